//! `2×2` matrices over `F_q((t))` acting on lattice classes (vertices) and on
//! `P¹(K)` (ends) by `x ↦ (ax + b)/(cx + d)`.

use std::fmt;

use super::vertex::TreeVertex;
use super::TreeError;
use crate::algebra::{Field, LaurentPolynomial, Precision, SkewLaurent};
use crate::moufang::{Carrier, Point};

/// Relative precision used when a matrix entry needs an inverse of an
/// exact polynomial with several terms.
pub const DEFAULT_WORKING_PRECISION: i64 = 48;

#[derive(Clone, PartialEq, Eq)]
pub struct Mobius {
    m: [[SkewLaurent; 2]; 2],
    rel: i64,
}

fn exact(p: &LaurentPolynomial) -> SkewLaurent {
    p.to_series()
}

impl Mobius {
    /// Fails on a twisted coefficient ring: the tree model is commutative.
    pub fn new(m: [[SkewLaurent; 2]; 2], rel: i64) -> Result<Self, TreeError> {
        if m.iter().flatten().any(|e| e.twist() != 0) {
            return Err(TreeError::NonCommutative);
        }
        Ok(Mobius { m, rel })
    }

    pub fn exact(m: [[LaurentPolynomial; 2]; 2]) -> Self {
        let [[a, b], [c, d]] = m;
        Mobius { m: [[exact(&a), exact(&b)], [exact(&c), exact(&d)]], rel: DEFAULT_WORKING_PRECISION }
    }

    pub fn identity(field: Field) -> Self {
        let (o, z) = (SkewLaurent::one(field, 0), SkewLaurent::zero(field, 0));
        Mobius { m: [[o.clone(), z.clone()], [z, o]], rel: DEFAULT_WORKING_PRECISION }
    }

    pub fn with_working_precision(mut self, rel: i64) -> Self {
        self.rel = rel;
        self
    }

    pub fn working_precision(&self) -> i64 {
        self.rel
    }

    pub fn field(&self) -> Field {
        self.m[0][0].field()
    }

    pub fn entries(&self) -> &[[SkewLaurent; 2]; 2] {
        &self.m
    }

    fn inv_entry(&self, x: &SkewLaurent) -> Result<SkewLaurent, TreeError> {
        x.inv_within(Some(self.rel)).map_err(|_| TreeError::Precision(format!("inverse of {x}")))
    }

    /// Matrix product `self · other`: apply `other` first.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        let (a, b) = (&self.m, &other.m);
        let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        Mobius { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]], rel: self.rel.max(other.rel) }
    }

    /// `other` after `self`, matching [`crate::perm::Perm::then`].
    pub fn then(&self, other: &Mobius) -> Mobius {
        other.compose(self)
    }

    pub fn determinant(&self) -> SkewLaurent {
        let m = &self.m;
        &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
    }

    pub fn inverse(&self) -> Result<Mobius, TreeError> {
        let di = self.inv_entry(&self.determinant())?;
        let m = &self.m;
        Ok(Mobius { m: [[&m[1][1] * &di, -&(&m[0][1] * &di)], [-&(&m[1][0] * &di), &m[0][0] * &di]], rel: self.rel })
    }

    pub fn power(&self, k: i64) -> Result<Mobius, TreeError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut out = Mobius::identity(self.field()).with_working_precision(self.rel);
        for _ in 0..k.unsigned_abs() {
            out = out.compose(&base);
        }
        Ok(out)
    }

    /// `self · other · self⁻¹`.
    pub fn conjugate(&self, other: &Mobius) -> Result<Mobius, TreeError> {
        Ok(self.compose(other).compose(&self.inverse()?))
    }

    pub fn act(&self, v: &TreeVertex) -> Result<TreeVertex, TreeError> {
        vertex_normalize(&self.compose(&v.basis()))
    }

    /// Fractional-linear action on `P¹(K)`, `∞ = [1:0]`.
    pub fn act_end(&self, p: &Point<SkewLaurent>) -> Result<Point<SkewLaurent>, TreeError> {
        let m = &self.m;
        let (num, den) = match p {
            Point::Inf => (m[0][0].clone(), m[1][0].clone()),
            Point::Fin(x) => (&(&m[0][0] * x) + &m[0][1], &(&m[1][0] * x) + &m[1][1]),
        };
        match den.zero_test() {
            Some(true) => Ok(Point::Inf),
            Some(false) => Ok(Point::Fin(&num * &self.inv_entry(&den)?)),
            None => Err(TreeError::Precision(format!("denominator {den}"))),
        }
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl fmt::Debug for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Column-Hermite reduction over `O`: the class of the column span of
/// `basis` as a canonical `(n, c)`.
pub fn vertex_normalize(basis: &Mobius) -> Result<TreeVertex, TreeError> {
    let field = basis.field();
    let [[a, b], [c, d]] = basis.entries().clone();
    let undetermined = |what: &str| TreeError::Precision(format!("{what} in {basis}"));
    // Pivot on the bottom entry of least valuation, moved to column 2.
    let swap = match (c.zero_test(), d.zero_test()) {
        (Some(true), Some(true)) => return Err(TreeError::Singular(basis.to_string())),
        (_, Some(true)) => true,
        (Some(true), _) => false,
        _ => match (c.valuation(), d.valuation()) {
            (Some(vc), Some(vd)) => vc < vd,
            (Some(vc), None) if d.valuation_bound().is_some_and(|p| p > vc) => true,
            (None, Some(vd)) if c.valuation_bound().is_some_and(|p| p >= vd) => false,
            _ => return Err(undetermined("bottom row")),
        },
    };
    let (a, b, c, d) = if swap { (b, a, d, c) } else { (a, b, c, d) };
    let d_inv = basis.inv_entry(&d)?;
    let r = &c * &d_inv;
    let alpha = &(&a - &(&r * &b)) * &d_inv;
    let beta = &b * &d_inv;
    let n = alpha.valuation().ok_or_else(|| undetermined("pivot column"))?;
    if beta.precision() < Precision::Absolute(n) {
        return Err(undetermined("second column"));
    }
    let rep = LaurentPolynomial::from_terms(field, beta.terms().filter(|&(e, _)| e < n).collect::<Vec<_>>());
    Ok(TreeVertex::new(n, &rep))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(f: Field, terms: &[(i64, u64)]) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(f, terms.iter().map(|&(e, i)| (e, f.element(i).unwrap())))
    }

    #[test]
    fn identity_basis_is_x0() {
        let f3 = Field::of_order(3).unwrap();
        assert_eq!(vertex_normalize(&Mobius::identity(f3)).unwrap(), TreeVertex::apartment(f3, 0));
    }

    #[test]
    fn diagonal_step_and_scalar_invariance() {
        let f3 = Field::of_order(3).unwrap();
        let z = LaurentPolynomial::zero(f3);
        let step = Mobius::exact([[lp(f3, &[(0, 1)]), z.clone()], [z.clone(), lp(f3, &[(-1, 1)])]]);
        assert_eq!(vertex_normalize(&step).unwrap(), TreeVertex::apartment(f3, 1));
        let v = TreeVertex::parse(f3, "(2; -1:2, 1:1)").unwrap();
        let scalar = Mobius::exact([[lp(f3, &[(3, 2), (4, 1)]), z.clone()], [z, lp(f3, &[(3, 2), (4, 1)])]]);
        assert_eq!(scalar.act(&v).unwrap(), v);
    }

    #[test]
    fn inverse_undoes() {
        let f5 = Field::of_order(5).unwrap();
        let g = Mobius::exact([[lp(f5, &[(0, 1), (1, 3)]), lp(f5, &[(-2, 4)])], [lp(f5, &[(1, 2)]), lp(f5, &[(0, 1)])]]);
        let gi = g.inverse().unwrap();
        let v = TreeVertex::parse(f5, "(3; -1:2, 2:4)").unwrap();
        assert_eq!(gi.act(&g.act(&v).unwrap()).unwrap(), v);
        let x = Point::Fin(lp(f5, &[(1, 1), (2, 1)]).to_series());
        let back = gi.act_end(&g.act_end(&x).unwrap()).unwrap();
        let Point::Fin(y) = back else { panic!() };
        let Point::Fin(x) = x else { panic!() };
        assert!((&y - &x).valuation_bound().unwrap() > 20);
    }
}
