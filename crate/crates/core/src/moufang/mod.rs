//! Concrete special Moufang sets `M(U, τ)` with abelian root groups and
//! checkers for the identities and congruences of their μ/Hua calculus.

pub mod certificate;
pub mod congruences;
pub mod faithful;
pub mod finite;
pub mod hua_group;
pub mod identities;
mod instance;
pub mod psi;
pub mod quotient;
mod set;

pub use instance::*;
pub use set::*;
