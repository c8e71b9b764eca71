//! The root group datum of type Ã₁ over `F_q[t, t⁻¹]` and its twin tree.

mod birkhoff;
mod matrix;
mod rgd;
mod twin;

pub use birkhoff::{birkhoff_reduce, BirkhoffError, BirkhoffForm, BirkhoffSummary};
pub use matrix::LMatrix;
pub use rgd::{check_rgd_axioms, make_rgd, GeneratorWord, RGDSystem, Sign};
pub use twin::{check_root_group_fullness, check_twin_axioms, codistance, TwinSummary, TwinVertex};
