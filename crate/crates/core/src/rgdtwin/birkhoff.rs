//! `M = P_− · D · P_+` with `P_− ∈ GL₂(F_q[t⁻¹])`, `P_+ ∈ GL₂(F_q[t])` and
//! `D` monomial, by column reduction of `t^N M` over `F_q[t]`.

use serde::Serialize;
use thiserror::Error;

use super::matrix::LMatrix;
use crate::algebra::LaurentPolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BirkhoffError {
    #[error("matrix {0} is not invertible over F_q[t, t⁻¹]")]
    NotInvertible(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BirkhoffForm {
    pub input: LMatrix,
    pub minus: LMatrix,
    pub core: LMatrix,
    pub plus: LMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct BirkhoffSummary {
    pub input: String,
    pub minus: String,
    pub core: String,
    pub plus: String,
    pub exponents: (i64, i64),
}

impl BirkhoffForm {
    /// `(a, b)` for the core `diag(c t^a, d t^b)` or `antidiag(c t^a, d t^b)`.
    pub fn exponents(&self) -> (i64, i64) {
        let m = self.core.entries();
        let deg = |p: &LaurentPolynomial| p.low_degree().expect("monomial core");
        if m[0][1].is_zero() {
            (deg(&m[0][0]), deg(&m[1][1]))
        } else {
            (deg(&m[0][1]), deg(&m[1][0]))
        }
    }

    /// `|a − b|`, independent of the chosen factors.
    pub fn spread(&self) -> u64 {
        let (a, b) = self.exponents();
        (a - b).unsigned_abs()
    }

    pub fn product(&self) -> LMatrix {
        &(&self.minus * &self.core) * &self.plus
    }

    pub fn summary(&self) -> BirkhoffSummary {
        BirkhoffSummary {
            input: self.input.to_string(),
            minus: self.minus.to_string(),
            core: self.core.to_string(),
            plus: self.plus.to_string(),
            exponents: self.exponents(),
        }
    }
}

fn column_degree(a: &LMatrix, j: usize) -> i64 {
    (0..2).filter_map(|i| a.entry(i, j).high_degree()).max().expect("nonzero column")
}

/// Right multiplication by `[[1, x], [0, 1]]` (`j = 1`) or `[[1, 0], [x, 1]]` (`j = 0`):
/// adds `x ·` column `1 − j` to column `j`.
fn column_op(j: usize, x: LaurentPolynomial) -> LMatrix {
    if j == 1 {
        LMatrix::upper(x)
    } else {
        LMatrix::lower(x)
    }
}

pub fn birkhoff_reduce(m: &LMatrix) -> Result<BirkhoffForm, BirkhoffError> {
    let field = m.field();
    if m.inverse().is_none() {
        return Err(BirkhoffError::NotInvertible(m.to_string()));
    }
    let n = -m.entries().iter().flatten().filter_map(|e| e.low_degree()).min().unwrap_or(0);
    let mut a = m.scale(&LaurentPolynomial::monomial(field.one(), n));
    let mut plus = LMatrix::identity(field);
    loop {
        let d = [column_degree(&a, 0), column_degree(&a, 1)];
        let lead = |j: usize| [a.entry(0, j).coeff(d[j]), a.entry(1, j).coeff(d[j])];
        let (l0, l1) = (lead(0), lead(1));
        if !(l0[0] * l1[1] - l0[1] * l1[0]).is_zero() {
            break;
        }
        // Leading vectors are proportional: lower the higher column.
        let (hi, lo) = if d[0] >= d[1] { (0, 1) } else { (1, 0) };
        let (lh, ll) = (lead(hi), lead(lo));
        let i = if ll[0].is_zero() { 1 } else { 0 };
        let lambda = lh[i] * ll[i].inv().expect("nonzero");
        let x = LaurentPolynomial::monomial(-lambda, d[hi] - d[lo]);
        a = &a * &column_op(hi, x.clone());
        plus = &column_op(hi, -x) * &plus;
    }
    let d = [column_degree(&a, 0), column_degree(&a, 1)];
    let t = |e: i64| LaurentPolynomial::monomial(field.one(), e);
    let mut minus = &a * &LMatrix::diag(t(-d[0]), t(-d[1]));
    let mut core = LMatrix::diag(t(d[0] - n), t(d[1] - n));
    // Unit determinant on the minus side.
    let c = minus.determinant().as_monomial().expect("constant determinant").0;
    let ci = c.inv().expect("nonzero");
    minus = &minus * &LMatrix::diag(LaurentPolynomial::constant(ci), LaurentPolynomial::one(field));
    plus = &LMatrix::diag(LaurentPolynomial::constant(c), LaurentPolynomial::one(field)) * &plus;
    // Constant monomial factors belong to the core.
    let constant_monomial = |g: &LMatrix| g.is_monomial() && g.entries().iter().flatten().all(|e| e.low_degree().is_none_or(|d| d == 0));
    if constant_monomial(&minus) {
        core = &minus * &core;
        minus = LMatrix::identity(field);
    }
    if constant_monomial(&plus) {
        core = &core * &plus;
        plus = LMatrix::identity(field);
    }
    debug_assert!(minus.is_polynomial_in_inverse() && plus.is_polynomial());
    Ok(BirkhoffForm { input: m.clone(), minus, core, plus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;

    fn lp(f: Field, t: &[(i64, i64)]) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(f, t.iter().map(|&(e, c)| (e, f.from_int(c))).collect::<Vec<_>>())
    }

    #[test]
    fn examples() {
        let f = Field::of_order(3).unwrap();
        let id = birkhoff_reduce(&LMatrix::identity(f)).unwrap();
        assert!(id.core.is_identity() && id.minus.is_identity() && id.plus.is_identity());

        let m = LMatrix::lower(lp(f, &[(1, 1)]));
        let b = birkhoff_reduce(&m).unwrap();
        assert!(b.core.is_identity() && b.minus.is_identity());
        assert_eq!(b.plus, m);

        let w = &LMatrix::new([[lp(f, &[]), lp(f, &[(0, -1)])], [lp(f, &[(0, 1)]), lp(f, &[])]]) * &LMatrix::torus(f.one(), 1);
        let b = birkhoff_reduce(&w).unwrap();
        assert_eq!(b.core, w);
        assert!(b.minus.is_identity() && b.plus.is_identity());
        assert_eq!(b.spread(), 2);
    }

    #[test]
    fn off_apartment_vertex_core() {
        let f = Field::of_order(3).unwrap();
        let m = LMatrix::new([[lp(f, &[(4, 1)]), lp(f, &[(3, 2)])], [lp(f, &[]), lp(f, &[(0, 1)])]]);
        let b = birkhoff_reduce(&m).unwrap();
        assert_eq!(b.product(), m);
        assert_eq!(b.spread(), 2);
    }

    #[test]
    fn singular_input_is_rejected() {
        let f = Field::of_order(2).unwrap();
        let m = LMatrix::diag(lp(f, &[(0, 1), (1, 1)]), lp(f, &[(0, 1)]));
        assert!(birkhoff_reduce(&m).is_err());
    }
}
