use std::fmt;

use thiserror::Error;

use crate::algebra::{Fq, SkewLaurent};

/// A value could not be decided at the available precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("value undetermined at the available precision")]
pub struct Undetermined;

/// Outcome of comparing two values that may be known only to some precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Equal,
    Different,
    Undecided,
}

/// How much agreement makes two inexact values equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tolerance {
    /// Coefficients that must agree past the reference valuation.
    pub digits: i64,
    /// Reference valuation used when neither side has a known nonzero term.
    pub floor: Option<i64>,
}

impl Tolerance {
    pub const EXACT: Tolerance = Tolerance { digits: 0, floor: None };

    pub fn digits(digits: i64) -> Self {
        Tolerance { digits, floor: None }
    }

    pub fn with_floor(self, floor: Option<i64>) -> Self {
        Tolerance { floor, ..self }
    }
}

/// Division-ring-like carrier of a root group `U` (additive) with the
/// multiplication used by the μ-maps.
pub trait Carrier: Clone + Send + Sync + fmt::Display + 'static {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Result<Self, Undetermined>;
    /// Inverse computed to relative precision `rel` when the exact inverse
    /// would be an infinite series.
    fn inv_within(&self, rel: Option<i64>) -> Result<Self, Undetermined> {
        let _ = rel;
        self.inv()
    }
    /// Exact zero of the same ring.
    fn zero_of(&self) -> Self;
    /// `Some(true)` if zero, `Some(false)` if nonzero, `None` if unknown.
    fn zero_test(&self) -> Option<bool>;
    /// Decides `self == other`; inexact values must agree on at least
    /// `tol.digits` coefficients past the lower of their valuations.
    fn agree(&self, other: &Self, tol: Tolerance) -> Agreement;
    fn valuation(&self) -> Option<i64>;
}

impl Carrier for Fq {
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn inv(&self) -> Result<Self, Undetermined> {
        Fq::inv(*self).ok_or(Undetermined)
    }
    fn zero_of(&self) -> Self {
        self.field().zero()
    }
    fn zero_test(&self) -> Option<bool> {
        Some(self.is_zero())
    }
    fn agree(&self, other: &Self, _: Tolerance) -> Agreement {
        if self == other {
            Agreement::Equal
        } else {
            Agreement::Different
        }
    }
    fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(0)
    }
}

impl Carrier for SkewLaurent {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Result<Self, Undetermined> {
        SkewLaurent::inv(self).map_err(|_| Undetermined)
    }
    fn inv_within(&self, rel: Option<i64>) -> Result<Self, Undetermined> {
        match (rel, SkewLaurent::valuation(self)) {
            (Some(r), Some(v)) if self.is_exact() && self.terms().nth(1).is_some() => SkewLaurent::inv(&self.truncate(v + r)).map_err(|_| Undetermined),
            _ => SkewLaurent::inv(self).map_err(|_| Undetermined),
        }
    }
    fn zero_of(&self) -> Self {
        SkewLaurent::zero(self.field(), self.twist())
    }
    fn zero_test(&self) -> Option<bool> {
        if self.is_exact_zero() {
            Some(true)
        } else if self.valuation().is_some() {
            Some(false)
        } else {
            None
        }
    }
    fn agree(&self, other: &Self, tol: Tolerance) -> Agreement {
        let d = self - other;
        if !d.is_known_zero() {
            return Agreement::Different;
        }
        if d.is_exact_zero() {
            return Agreement::Equal;
        }
        let reference = match (SkewLaurent::valuation(self), SkewLaurent::valuation(other)) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => match tol.floor {
                Some(f) => f,
                None => return Agreement::Undecided,
            },
        };
        match d.valuation_bound() {
            Some(p) if p - reference >= tol.digits => Agreement::Equal,
            _ => Agreement::Undecided,
        }
    }
    fn valuation(&self) -> Option<i64> {
        SkewLaurent::valuation(self)
    }
}

/// A point of the boundary `U ∪ {∞}`.
#[derive(Clone, PartialEq, Eq)]
pub enum Point<C> {
    Inf,
    Fin(C),
}

impl<C: Carrier> Point<C> {
    pub fn finite(&self) -> Option<&C> {
        match self {
            Point::Inf => None,
            Point::Fin(c) => Some(c),
        }
    }

    pub fn agree(&self, other: &Self, tol: Tolerance) -> Agreement {
        match (self, other) {
            (Point::Inf, Point::Inf) => Agreement::Equal,
            (Point::Fin(a), Point::Fin(b)) => a.agree(b, tol),
            (Point::Inf, Point::Fin(x)) | (Point::Fin(x), Point::Inf) => match x.zero_test() {
                // a finite value is never ∞, but an undetermined one may be
                // an artefact of cancellation upstream
                Some(_) => Agreement::Different,
                None => Agreement::Undecided,
            },
        }
    }
}

impl<C: fmt::Display> fmt::Display for Point<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Inf => write!(f, "inf"),
            Point::Fin(c) => write!(f, "{c}"),
        }
    }
}

impl<C: fmt::Display> fmt::Debug for Point<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The Moufang set `M(U, τ)` with `τ = μ_e`: `xτ = −e x⁻¹ e`.
///
/// All maps act on the right. `μ_a: x ↦ −a x⁻¹ a` swaps `0` and `∞`, and the
/// Hua map `h_a = τμ_a` is evaluated through that composition.
#[derive(Clone, Debug)]
pub struct MoufangSet<C> {
    e: C,
    e_inv: C,
    working: Option<i64>,
}

impl<C: Carrier> MoufangSet<C> {
    /// `None` if `e` is not known to be nonzero.
    pub fn new(e: C) -> Option<Self> {
        Self::with_precision(e, None)
    }

    /// Inverses of exact multi-term values are computed to relative
    /// precision `working`.
    pub fn with_precision(e: C, working: Option<i64>) -> Option<Self> {
        let e_inv = e.inv_within(working).ok()?;
        Some(MoufangSet { e, e_inv, working })
    }

    pub fn working_precision(&self) -> Option<i64> {
        self.working
    }

    pub fn invert(&self, x: &C) -> Result<C, Undetermined> {
        x.inv_within(self.working)
    }

    /// The base element `e` of `τ = μ_e`.
    pub fn unit(&self) -> &C {
        &self.e
    }

    pub fn zero(&self) -> C {
        self.e.zero_of()
    }

    fn nonzero(x: &C) -> Result<bool, Undetermined> {
        x.zero_test().map(|z| !z).ok_or(Undetermined)
    }

    /// `xμ_a` for nonzero `a` and a finite nonzero or zero `x`.
    fn mu_value(&self, a: &C, x: &C) -> Result<Point<C>, Undetermined> {
        if !Self::nonzero(x)? {
            return Ok(Point::Inf);
        }
        Ok(Point::Fin(a.mul(&self.invert(x)?).mul(a).neg()))
    }

    /// `pμ_a`; `a` must be nonzero.
    pub fn mu(&self, a: &C, p: &Point<C>) -> Result<Point<C>, Undetermined> {
        if !Self::nonzero(a)? {
            return Err(Undetermined);
        }
        match p {
            Point::Inf => Ok(Point::Fin(self.zero())),
            Point::Fin(x) => self.mu_value(a, x),
        }
    }

    pub fn tau(&self, p: &Point<C>) -> Result<Point<C>, Undetermined> {
        self.mu(&self.e, p)
    }

    /// `τ⁻¹ = μ_{−e}`.
    pub fn tau_inv(&self, p: &Point<C>) -> Result<Point<C>, Undetermined> {
        self.mu(&self.e.neg(), p)
    }

    /// The root-group element `α_b: x ↦ x + b`, fixing `∞`.
    pub fn translate(&self, b: &C, p: &Point<C>) -> Point<C> {
        match p {
            Point::Inf => Point::Inf,
            Point::Fin(x) => Point::Fin(x.add(b)),
        }
    }

    /// `x h_a = (xτ)μ_a`, with `h_0` the zero map. An `x` that is zero only to
    /// some precision goes through the closed form, which keeps that precision.
    pub fn hua(&self, a: &C, x: &C) -> Result<C, Undetermined> {
        if !Self::nonzero(a)? {
            return Ok(self.zero());
        }
        if x.zero_test().is_none() {
            return Ok(self.hua_closed(a, x));
        }
        let y = self.tau(&Point::Fin(x.clone()))?;
        match self.mu(a, &y)? {
            Point::Fin(v) => Ok(v),
            Point::Inf => unreachable!("Hua maps fix ∞ and send U to U"),
        }
    }

    /// Closed form `x h_a = a e⁻¹ x e⁻¹ a`.
    pub fn hua_closed(&self, a: &C, x: &C) -> C {
        a.mul(&self.e_inv).mul(x).mul(&self.e_inv).mul(a)
    }

    /// Inverse of the Hua map `h_a` in closed form: `y ↦ e a⁻¹ y a⁻¹ e`.
    pub fn hua_inverse(&self, a: &C, y: &C) -> Result<C, Undetermined> {
        let ai = self.invert(a)?;
        Ok(self.e.mul(&ai).mul(y).mul(&ai).mul(&self.e))
    }

    /// `x h_{a,b} = x h_{a+b} − x h_a − x h_b`.
    pub fn hua_sym(&self, a: &C, b: &C, x: &C) -> Result<C, Undetermined> {
        Ok(self.hua(&a.add(b), x)?.sub(&self.hua(a, x)?).sub(&self.hua(b, x)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;

    #[test]
    fn finite_field_examples() {
        let f5 = Field::of_order(5).unwrap();
        let m = MoufangSet::new(f5.one()).unwrap();
        let n = |i: i64| f5.from_int(i);
        assert_eq!(m.tau(&Point::Fin(n(2))).unwrap(), Point::Fin(n(2)));
        assert_eq!(m.tau(&Point::Fin(n(0))).unwrap(), Point::Inf);
        assert_eq!(m.mu(&n(1), &Point::Fin(n(1))).unwrap(), Point::Fin(n(4)));
        assert_eq!(m.mu(&n(1), &Point::Fin(n(2))).unwrap(), Point::Fin(n(2)));
        assert_eq!(m.hua(&n(2), &n(3)).unwrap(), n(2));
        assert_eq!(m.hua(&n(0), &n(3)).unwrap(), n(0));
        assert!(f5.elements().all(|x| m.hua(&n(1), &x).unwrap() == x));
    }

    #[test]
    fn twisted_examples() {
        let k = Field::of_order(4).unwrap();
        let w = k.element(2).unwrap();
        let m = MoufangSet::new(SkewLaurent::one(k, 1)).unwrap();
        let a = SkewLaurent::monomial(w, 1, 1);
        let x = SkewLaurent::constant(w, 1);
        // (ωt)ω(ωt) = ω·θ(ω)·θ(ω) t² = ω·ω²·ω² t² = ω² t²
        assert_eq!(m.hua(&a, &x).unwrap(), SkewLaurent::monomial(w * w, 2, 1));
        assert_eq!(m.hua_closed(&a, &x), SkewLaurent::monomial(w * w, 2, 1));
        let once = m.mu(&a, &Point::Fin(x.clone())).unwrap();
        assert_eq!(m.mu(&a, &once).unwrap(), Point::Fin(x));
    }

    #[test]
    fn tau_of_t_in_f3_series() {
        let k = Field::of_order(3).unwrap();
        let m = MoufangSet::new(SkewLaurent::one(k, 0)).unwrap();
        let t = SkewLaurent::t(k, 0);
        assert_eq!(m.tau(&Point::Fin(t)).unwrap(), Point::Fin(SkewLaurent::monomial(k.from_int(2), -1, 0)));
    }
}
