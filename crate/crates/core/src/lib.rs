//! Moufang sets with abelian root groups, their trees, and the finite
//! structures used to verify them.

pub mod algebra;
pub mod moufang;
pub mod mqm;
pub mod perm;
pub mod report;
pub mod rgdtwin;
pub mod suite;
pub mod tree;
