//! Runs the guide snippets as doc-tests, one module per chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/fields-and-series.md")]
pub mod fields_and_series {}
#[doc = include_str!("../../../book/src/moufang-sets.md")]
pub mod moufang_sets {}
#[doc = include_str!("../../../book/src/trees.md")]
pub mod trees {}
#[doc = include_str!("../../../book/src/quadratic-maps.md")]
pub mod quadratic_maps {}
#[doc = include_str!("../../../book/src/twin-tree.md")]
pub mod twin_tree {}
#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}
