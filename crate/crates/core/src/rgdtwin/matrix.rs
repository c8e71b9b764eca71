//! Exact `2×2` matrices over `F_q[t, t⁻¹]`.

use std::fmt;
use std::ops::{Mul, Neg};

use crate::algebra::{Field, Fq, LaurentPolynomial};
use crate::tree::Mobius;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LMatrix {
    m: [[LaurentPolynomial; 2]; 2],
}

impl LMatrix {
    pub fn new(m: [[LaurentPolynomial; 2]; 2]) -> Self {
        let f = m[0][0].field();
        assert!(m.iter().flatten().all(|e| e.field() == f), "entries over one field");
        LMatrix { m }
    }

    pub fn identity(field: Field) -> Self {
        let (o, z) = (LaurentPolynomial::one(field), LaurentPolynomial::zero(field));
        LMatrix { m: [[o.clone(), z.clone()], [z, o]] }
    }

    /// `[[1, x], [0, 1]]`.
    pub fn upper(x: LaurentPolynomial) -> Self {
        let f = x.field();
        LMatrix { m: [[LaurentPolynomial::one(f), x], [LaurentPolynomial::zero(f), LaurentPolynomial::one(f)]] }
    }

    /// `[[1, 0], [x, 1]]`.
    pub fn lower(x: LaurentPolynomial) -> Self {
        let f = x.field();
        LMatrix { m: [[LaurentPolynomial::one(f), LaurentPolynomial::zero(f)], [x, LaurentPolynomial::one(f)]] }
    }

    pub fn diag(a: LaurentPolynomial, d: LaurentPolynomial) -> Self {
        let f = a.field();
        LMatrix { m: [[a, LaurentPolynomial::zero(f)], [LaurentPolynomial::zero(f), d]] }
    }

    /// `diag(c t^k, c⁻¹ t^{−k})`.
    pub fn torus(c: Fq, k: i64) -> Self {
        Self::diag(LaurentPolynomial::monomial(c, k), LaurentPolynomial::monomial(c.inv().expect("nonzero"), -k))
    }

    pub fn field(&self) -> Field {
        self.m[0][0].field()
    }

    pub fn entries(&self) -> &[[LaurentPolynomial; 2]; 2] {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &LaurentPolynomial {
        &self.m[i][j]
    }

    pub fn determinant(&self) -> LaurentPolynomial {
        let m = &self.m;
        &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
    }

    /// Invertible over `F_q[t, t⁻¹]` iff the determinant is a monomial.
    pub fn inverse(&self) -> Option<Self> {
        let (c, k) = self.determinant().as_monomial()?;
        let di = LaurentPolynomial::monomial(c.inv()?, -k);
        let m = &self.m;
        Some(LMatrix { m: [[&m[1][1] * &di, -&(&m[0][1] * &di)], [-&(&m[1][0] * &di), &m[0][0] * &di]] })
    }

    /// `g⁻¹ · self · g`.
    pub fn conjugate_by(&self, g: &LMatrix) -> Option<Self> {
        Some(&(&g.inverse()? * self) * g)
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, other: &LMatrix) -> Option<Self> {
        Some(&(&(&self.inverse()? * &other.inverse()?) * self) * other)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.field())
    }

    /// Equal up to the center `{±1}`.
    pub fn eq_mod_center(&self, other: &LMatrix) -> bool {
        self == other || *self == -other
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        let one = LaurentPolynomial::one(self.field());
        self.m[0][0] == one && self.m[1][1] == one && self.m[1][0].is_zero()
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        let one = LaurentPolynomial::one(self.field());
        self.m[0][0] == one && self.m[1][1] == one && self.m[0][1].is_zero()
    }

    /// Diagonal or antidiagonal with monomial entries.
    pub fn is_monomial(&self) -> bool {
        let m = &self.m;
        let mono = |p: &LaurentPolynomial| p.as_monomial().is_some();
        (mono(&m[0][0]) && mono(&m[1][1]) && m[0][1].is_zero() && m[1][0].is_zero())
            || (mono(&m[0][1]) && mono(&m[1][0]) && m[0][0].is_zero() && m[1][1].is_zero())
    }

    /// All entries in `F_q[t]`.
    pub fn is_polynomial(&self) -> bool {
        self.m.iter().flatten().all(|e| e.low_degree().is_none_or(|d| d >= 0))
    }

    /// All entries in `F_q[t⁻¹]`.
    pub fn is_polynomial_in_inverse(&self) -> bool {
        self.m.iter().flatten().all(|e| e.high_degree().is_none_or(|d| d <= 0))
    }

    /// The substitution `t ↦ t⁻¹`.
    pub fn invert_variable(&self) -> Self {
        LMatrix { m: self.m.clone().map(|row| row.map(|e| e.invert_variable())) }
    }

    pub fn scale(&self, c: &LaurentPolynomial) -> Self {
        LMatrix { m: self.m.clone().map(|row| row.map(|e| &e * c)) }
    }

    pub fn to_mobius(&self) -> Mobius {
        Mobius::exact(self.m.clone())
    }

    /// Four entries row-major, separated by `;`.
    pub fn parse(field: Field, text: &str) -> Result<Self, crate::algebra::ParseLaurentError> {
        let parts: Vec<&str> = text.split(';').collect();
        if parts.len() != 4 {
            return Err(crate::algebra::ParseLaurentError(text.to_string()));
        }
        let e = |i: usize| LaurentPolynomial::parse(field, parts[i]);
        Ok(LMatrix { m: [[e(0)?, e(1)?], [e(2)?, e(3)?]] })
    }
}

impl Mul for &LMatrix {
    type Output = LMatrix;
    fn mul(self, o: &LMatrix) -> LMatrix {
        let (a, b) = (&self.m, &o.m);
        let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        LMatrix { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }
}

impl Mul for LMatrix {
    type Output = LMatrix;
    fn mul(self, o: LMatrix) -> LMatrix {
        &self * &o
    }
}

impl Neg for &LMatrix {
    type Output = LMatrix;
    fn neg(self) -> LMatrix {
        LMatrix { m: self.m.clone().map(|row| row.map(|e| -e)) }
    }
}

impl fmt::Display for LMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(f, "{};{};{};{}", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl fmt::Debug for LMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_text() {
        let f = Field::of_order(3).unwrap();
        let x = LaurentPolynomial::from_terms(f, [(-2, f.one()), (1, f.from_int(2))]);
        let g = &LMatrix::upper(x.clone()) * &LMatrix::lower(x.shift(1));
        assert!((&g * &g.inverse().unwrap()).is_identity());
        assert_eq!(LMatrix::parse(f, &g.to_string()).unwrap(), g);
        let singular = LMatrix::diag(&LaurentPolynomial::one(f) + &x, LaurentPolynomial::one(f));
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn same_sign_unipotents_commute() {
        let f = Field::of_order(2).unwrap();
        let a = LMatrix::lower(LaurentPolynomial::monomial(f.one(), 1));
        let b = LMatrix::lower(LaurentPolynomial::monomial(f.one(), 3));
        assert!(a.commutator(&b).unwrap().is_identity());
    }
}
