//! Exact Laurent polynomials over a finite field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

use super::field::{Field, Fq};
use super::series::SkewLaurent;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed Laurent polynomial: {0}")]
pub struct ParseLaurentError(pub String);

/// Finite sum `Σ c_e t^e` with nonzero first and last stored coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial {
    field: Field,
    start: i64,
    coeffs: Vec<Fq>,
}

impl LaurentPolynomial {
    fn normalized(field: Field, start: i64, mut coeffs: Vec<Fq>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        let start = if coeffs.is_empty() { 0 } else { start + lead as i64 };
        LaurentPolynomial { field, start, coeffs }
    }

    pub fn zero(field: Field) -> Self {
        Self::normalized(field, 0, Vec::new())
    }

    pub fn one(field: Field) -> Self {
        Self::monomial(field.one(), 0)
    }

    pub fn constant(c: Fq) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Fq, e: i64) -> Self {
        Self::normalized(c.field(), e, vec![c])
    }

    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = (i64, Fq)>) -> Self {
        let terms: Vec<(i64, Fq)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero(field);
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![field.zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::normalized(field, lo, coeffs)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.start)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn high_degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.start + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, e: i64) -> Fq {
        let i = e - self.start;
        if i < 0 || i >= self.coeffs.len() as i64 {
            self.field.zero()
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Fq)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, &c)| (self.start + i as i64, c))
    }

    /// Units of `F_q[t, t⁻¹]` are the nonzero monomials.
    pub fn as_monomial(&self) -> Option<(Fq, i64)> {
        (self.coeffs.len() == 1).then(|| (self.coeffs[0], self.start))
    }

    pub fn scale(&self, c: Fq) -> Self {
        Self::normalized(self.field, self.start, self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::normalized(self.field, self.start + k, self.coeffs.clone())
    }

    /// The substitution `t ↦ t⁻¹`.
    pub fn invert_variable(&self) -> Self {
        Self::from_terms(self.field, self.terms().map(|(e, c)| (-e, c)).collect::<Vec<_>>())
    }

    /// Terms with exponent in the half-open range `lo..hi`.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        Self::from_terms(self.field, self.terms().filter(|&(e, _)| e >= lo && e < hi).collect::<Vec<_>>())
    }

    /// Exact series with the same terms.
    pub fn to_series(&self) -> SkewLaurent {
        SkewLaurent::from_terms(self.field, 0, self.terms().collect::<Vec<_>>(), None)
    }

    /// Terms of a series below its precision (or all terms of an exact series).
    pub fn from_series(s: &SkewLaurent) -> Self {
        Self::from_terms(s.field(), s.terms().collect::<Vec<_>>())
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        assert_eq!(self.field, other.field, "Laurent polynomials over different fields");
        let mut terms: Vec<(i64, Fq)> = self.terms().collect();
        terms.extend(other.terms().map(|(e, c)| (e, if negate { -c } else { c })));
        Self::from_terms(self.field, terms)
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self.combine(rhs, false)
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        self.combine(rhs, true)
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        assert_eq!(self.field, rhs.field, "Laurent polynomials over different fields");
        if self.is_zero() || rhs.is_zero() {
            return LaurentPolynomial::zero(self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LaurentPolynomial::normalized(self.field, self.start + rhs.start, coeffs)
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        self.scale(-self.field.one())
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $method(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
                (&self).$method(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        -&self
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|(e, c)| format!("{c}*t^{e}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl LaurentPolynomial {
    /// Parses `<idx>*t^<e>+...` (or `0`) over `field`.
    pub fn parse(field: Field, text: &str) -> Result<Self, ParseLaurentError> {
        let text = text.trim();
        let bad = || ParseLaurentError(text.to_string());
        if text == "0" {
            return Ok(Self::zero(field));
        }
        let mut terms = Vec::new();
        for part in text.split('+') {
            let (c, e) = part.trim().split_once("*t^").ok_or_else(bad)?;
            let c = u64::from_str(c.trim()).ok().and_then(|i| field.element(i).ok()).ok_or_else(bad)?;
            let e = i64::from_str(e.trim()).map_err(|_| bad())?;
            if c.is_zero() {
                return Err(bad());
            }
            terms.push((e, c));
        }
        Ok(Self::from_terms(field, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_examples() {
        let k = Field::of_order(3).unwrap();
        let t = LaurentPolynomial::monomial(k.one(), 1);
        let tinv = LaurentPolynomial::monomial(k.one(), -1);
        assert_eq!(&t * &tinv, LaurentPolynomial::one(k));
        let one = LaurentPolynomial::one(k);
        let a = &one + &t;
        let b = &one - &t;
        let t2 = LaurentPolynomial::monomial(k.one(), 2);
        assert_eq!(&a * &b, &one - &t2);
        assert_eq!(&a + &LaurentPolynomial::zero(k), a);
    }

    #[test]
    fn text_roundtrip() {
        let k = Field::of_order(4).unwrap();
        let p = LaurentPolynomial::from_terms(k, [(3, k.element(2).unwrap()), (-1, k.one())]);
        assert_eq!(p.to_string(), "1*t^-1+2*t^3");
        assert_eq!(LaurentPolynomial::parse(k, &p.to_string()).unwrap(), p);
        assert_eq!(LaurentPolynomial::parse(k, "0").unwrap(), LaurentPolynomial::zero(k));
        assert!(LaurentPolynomial::parse(k, "5*t^1").is_err());
    }

    #[test]
    fn variable_inversion() {
        let k = Field::of_order(5).unwrap();
        let p = LaurentPolynomial::from_terms(k, [(2, k.from_int(3)), (-4, k.one())]);
        let q = p.invert_variable();
        assert_eq!(q.low_degree(), Some(-2));
        assert_eq!(q.high_degree(), Some(4));
        assert_eq!(q.invert_variable(), p);
    }
}
