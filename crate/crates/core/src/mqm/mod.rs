//! Multiplicative quadratic maps between finite fields: axioms,
//! classification by pairs of embeddings, and two exhaustive scans.

pub mod classify;
pub mod f9;
pub mod galois;
pub mod map;
pub mod matrix;

pub use classify::{classify, Classification, ClassifyError, MqmCase};
pub use map::{MQMap, Table, Verdict};
pub use matrix::FpMatrix;
