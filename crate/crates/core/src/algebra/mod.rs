//! Exact arithmetic substrates: finite fields, skew Laurent series with
//! absolute-precision tracking, and exact Laurent polynomials.

mod field;
mod laurent;
mod series;

pub use field::{Embedding, Field, FieldError, Fq, MAX_FIELD_ORDER};
pub use laurent::{LaurentPolynomial, ParseLaurentError};
pub use series::{Precision, SeriesError, SkewLaurent};
