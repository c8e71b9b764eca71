//! Skew Laurent series `K((t))_θ` with `θ = Frob^k`, coefficients written on
//! the left (`Σ a_i t^i`) and multiplication twisted by `t·a = θ(a)·t`.
//!
//! Every value carries an absolute precision `N`: coefficients at exponents
//! `< N` are known, the rest are not. Finite sums may be exact (`N = ∞`).
//! A value with no known nonzero coefficient is either the exact zero or a
//! "zero to precision N", and the two are kept apart.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use super::field::{Field, Fq};

const EXACT: i64 = i64::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("operands live over different rings ({0} and {1})")]
    Mismatch(String, String),
    #[error("inverse of the exact zero")]
    ZeroInverse,
    #[error("leading term undetermined: zero to precision {0}")]
    Undetermined(i64),
    #[error("exact series with several terms has no finite inverse; truncate it first")]
    InfiniteInverse,
    #[error("involution needs a twist of order at most 2 (θ = Frob^{k} on a degree-{r} field)")]
    TwistOrder { k: u32, r: u32 },
    #[error("malformed series text: {0}")]
    Parse(String),
}

/// Absolute precision of a series value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precision {
    Absolute(i64),
    Exact,
}

impl Precision {
    fn from_raw(n: i64) -> Self {
        if n == EXACT {
            Precision::Exact
        } else {
            Precision::Absolute(n)
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Absolute(n) => write!(f, "{n}"),
            Precision::Exact => write!(f, "inf"),
        }
    }
}

fn shift(prec: i64, by: i64) -> i64 {
    if prec == EXACT {
        EXACT
    } else {
        prec + by
    }
}

#[derive(Clone)]
pub struct SkewLaurent {
    field: Field,
    twist: u32,
    // Exponent of coeffs[0]; coeffs has nonzero first and last entries.
    start: i64,
    coeffs: Vec<Fq>,
    prec: i64,
}

impl SkewLaurent {
    fn normalized(field: Field, twist: u32, start: i64, mut coeffs: Vec<Fq>, prec: i64) -> Self {
        if prec != EXACT {
            let keep = (prec - start).clamp(0, coeffs.len() as i64) as usize;
            coeffs.truncate(keep);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        SkewLaurent { field, twist: twist % field.degree(), start: start + lead as i64, coeffs, prec }
    }

    /// Series from `(exponent, coefficient)` terms; repeated exponents add up.
    /// Terms at or above `prec` are discarded; `None` means exact.
    pub fn from_terms(field: Field, twist: u32, terms: impl IntoIterator<Item = (i64, Fq)>, prec: Option<i64>) -> Self {
        let mut terms: Vec<(i64, Fq)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let prec = prec.unwrap_or(EXACT);
        if terms.is_empty() {
            return Self::normalized(field, twist, 0, Vec::new(), prec);
        }
        terms.sort_by_key(|&(e, _)| e);
        let lo = terms[0].0;
        let hi = terms.last().unwrap().0;
        let mut coeffs = vec![field.zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::normalized(field, twist, lo, coeffs, prec)
    }

    /// Series with coefficients `coeffs[i]` at exponent `start + i`.
    pub fn from_coeffs(field: Field, twist: u32, start: i64, coeffs: Vec<Fq>, prec: Option<i64>) -> Self {
        Self::normalized(field, twist, start, coeffs, prec.unwrap_or(EXACT))
    }

    pub fn zero(field: Field, twist: u32) -> Self {
        Self::normalized(field, twist, 0, Vec::new(), EXACT)
    }

    /// A value known only to have valuation at least `prec`.
    pub fn zero_to(field: Field, twist: u32, prec: i64) -> Self {
        Self::normalized(field, twist, 0, Vec::new(), prec)
    }

    pub fn one(field: Field, twist: u32) -> Self {
        Self::monomial(field.one(), 0, twist)
    }

    pub fn constant(c: Fq, twist: u32) -> Self {
        Self::monomial(c, 0, twist)
    }

    /// The exact monomial `c·t^e`.
    pub fn monomial(c: Fq, e: i64, twist: u32) -> Self {
        Self::normalized(c.field(), twist, e, vec![c], EXACT)
    }

    pub fn t(field: Field, twist: u32) -> Self {
        Self::monomial(field.one(), 1, twist)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Twist exponent `k` with `θ = Frob^k`.
    pub fn twist(&self) -> u32 {
        self.twist
    }

    pub fn precision(&self) -> Precision {
        Precision::from_raw(self.prec)
    }

    pub fn is_exact(&self) -> bool {
        self.prec == EXACT
    }

    /// Valuation if some coefficient is known to be nonzero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    /// A lower bound for the valuation that is certainly correct: the valuation
    /// itself, the precision for a zero to precision, `None` for the exact zero.
    pub fn valuation_bound(&self) -> Option<i64> {
        match self.valuation() {
            Some(v) => Some(v),
            None if self.prec == EXACT => None,
            None => Some(self.prec),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec == EXACT
    }

    /// No known nonzero coefficient (exact zero or zero to precision).
    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at exponent `e`, or `None` if `e` is at or above the precision.
    pub fn coeff(&self, e: i64) -> Option<Fq> {
        if e >= self.prec {
            return None;
        }
        let i = e - self.start;
        if self.coeffs.is_empty() || i < 0 || i >= self.coeffs.len() as i64 {
            Some(self.field.zero())
        } else {
            Some(self.coeffs[i as usize])
        }
    }

    pub fn leading_coeff(&self) -> Option<Fq> {
        self.coeffs.first().copied()
    }

    /// Known nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Fq)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, &c)| (self.start + i as i64, c))
    }

    /// Forget everything at exponents `>= prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        Self::normalized(self.field, self.twist, self.start, self.coeffs.clone(), self.prec.min(prec))
    }

    /// Decides `v(self) >= m`: `Some(true)` or `Some(false)` when determined,
    /// `None` when the known coefficients vanish but the precision is below `m`.
    pub fn valuation_at_least(&self, m: i64) -> Option<bool> {
        match self.valuation() {
            Some(v) => Some(v >= m),
            None if self.prec >= m => Some(true),
            None => None,
        }
    }

    fn same_ring(&self, other: &Self) -> Result<(), SeriesError> {
        if self.field != other.field || self.twist != other.twist {
            return Err(SeriesError::Mismatch(self.ring_name(), other.ring_name()));
        }
        Ok(())
    }

    fn ring_name(&self) -> String {
        if self.twist == 0 {
            format!("{}((t))", self.field)
        } else {
            format!("{}((t))_Frob^{}", self.field, self.twist)
        }
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let prec = self.prec.min(other.prec);
        if self.coeffs.is_empty() && other.coeffs.is_empty() {
            return Self::normalized(self.field, self.twist, 0, Vec::new(), prec);
        }
        let lo = match (self.valuation(), other.valuation()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!(),
        };
        let end = |s: &Self| if s.coeffs.is_empty() { lo } else { s.start + s.coeffs.len() as i64 };
        let hi = end(self).max(end(other));
        let mut coeffs = vec![self.field.zero(); (hi - lo) as usize];
        for (e, c) in self.terms() {
            coeffs[(e - lo) as usize] += c;
        }
        for (e, c) in other.terms() {
            let c = if negate { -c } else { c };
            coeffs[(e - lo) as usize] += c;
        }
        Self::normalized(self.field, self.twist, lo, coeffs, prec)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_ring(other)?;
        Ok(self.combine(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_ring(other)?;
        Ok(self.combine(other, true))
    }

    /// `θ^i` applied to a coefficient.
    fn theta(&self, c: Fq, i: i64) -> Fq {
        c.frobenius(self.twist as i64 * i)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_ring(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zero(self.field, self.twist));
        }
        let va = self.valuation_bound().unwrap();
        let vb = other.valuation_bound().unwrap();
        let prec = shift(self.prec, vb).min(shift(other.prec, va));
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(Self::normalized(self.field, self.twist, 0, Vec::new(), prec));
        }
        let lo = va + vb;
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if prec != EXACT {
            len = len.min((prec - lo).max(0) as usize);
        }
        let mut coeffs = vec![self.field.zero(); len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            let ei = self.start + i as i64;
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] += a * self.theta(b, ei);
                }
            }
        }
        Ok(Self::normalized(self.field, self.twist, lo, coeffs, prec))
    }

    /// Multiplicative inverse. The relative precision is preserved, so an
    /// input with valuation `v` and precision `N` yields precision `N - 2v`.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let Some(v) = self.valuation() else {
            return Err(if self.prec == EXACT { SeriesError::ZeroInverse } else { SeriesError::Undetermined(self.prec) });
        };
        let lead_inv = self.coeffs[0].inv().expect("leading coefficient is nonzero");
        if self.prec == EXACT {
            if self.coeffs.len() > 1 {
                return Err(SeriesError::InfiniteInverse);
            }
            return Ok(Self::monomial(self.theta(lead_inv, -v), -v, self.twist));
        }
        // Solve self * z = 1 coefficient by coefficient, z_s at exponent s - v.
        let rel = (self.prec - v) as usize;
        let mut z: Vec<Fq> = Vec::with_capacity(rel);
        z.push(self.theta(lead_inv, -v));
        for s in 1..rel {
            let mut acc = self.field.zero();
            for i in 1..=s.min(self.coeffs.len() - 1) {
                let a = self.coeffs[i];
                if !a.is_zero() {
                    acc += a * self.theta(z[s - i], v + i as i64);
                }
            }
            z.push(self.theta(-(lead_inv * acc), -v));
        }
        Ok(Self::normalized(self.field, self.twist, -v, z, self.prec - 2 * v))
    }

    /// The involution `Σ a_i t^i ↦ Σ t^i σ(a_i)` with `σ = θ` when
    /// `sigma_is_theta`, else `σ = id`. Requires `θ² = id`.
    pub fn star(&self, sigma_is_theta: bool) -> Result<Self, SeriesError> {
        let r = self.field.degree();
        if !(2 * self.twist).is_multiple_of(r) {
            return Err(SeriesError::TwistOrder { k: self.twist, r });
        }
        let s = if sigma_is_theta { 1 } else { 0 };
        let coeffs = self.coeffs.iter().enumerate().map(|(i, &c)| self.theta(c, self.start + i as i64 + s)).collect();
        Ok(Self::normalized(self.field, self.twist, self.start, coeffs, self.prec))
    }

    /// Left scalar multiple `c·self`.
    pub fn scale(&self, c: Fq) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| c * a).collect();
        Self::normalized(self.field, self.twist, self.start, coeffs, self.prec)
    }

    /// Parses `v=<int|inf>;N=<int|inf>;coeffs=<idx,...>` over the given ring.
    pub fn parse(field: Field, twist: u32, text: &str) -> Result<Self, SeriesError> {
        let bad = || SeriesError::Parse(text.to_string());
        let mut parts = text.trim().split(';');
        let mut field_of = |key: &str| parts.next().and_then(|p| p.trim().strip_prefix(key)).map(str::trim).ok_or_else(bad);
        let v = field_of("v=")?;
        let n = field_of("N=")?;
        let coeffs = field_of("coeffs=")?;
        let prec = if n == "inf" { EXACT } else { n.parse::<i64>().map_err(|_| bad())? };
        let values: Vec<Fq> = if coeffs.is_empty() {
            Vec::new()
        } else {
            coeffs.split(',').map(|c| c.trim().parse::<u64>().ok().and_then(|i| field.element(i).ok()).ok_or_else(bad)).collect::<Result<_, _>>()?
        };
        if v == "inf" {
            if !values.is_empty() {
                return Err(bad());
            }
            return Ok(Self::normalized(field, twist, 0, Vec::new(), prec));
        }
        let start = v.parse::<i64>().map_err(|_| bad())?;
        if values.first().is_none_or(|c| c.is_zero()) || (prec != EXACT && start + values.len() as i64 > prec) {
            return Err(bad());
        }
        Ok(Self::normalized(field, twist, start, values, prec))
    }
}

impl PartialEq for SkewLaurent {
    /// Representation equality: same ring, same known coefficients, same precision.
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.twist == other.twist
            && self.prec == other.prec
            && self.coeffs == other.coeffs
            && (self.coeffs.is_empty() || self.start == other.start)
    }
}
impl Eq for SkewLaurent {}

impl std::hash::Hash for SkewLaurent {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.prec.hash(state);
        if !self.coeffs.is_empty() {
            self.start.hash(state);
        }
        self.coeffs.hash(state);
    }
}

impl fmt::Display for SkewLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = Precision::from_raw(self.prec);
        match self.valuation() {
            None => write!(f, "v=inf;N={n};coeffs="),
            Some(v) => {
                let end = if self.prec == EXACT { v + self.coeffs.len() as i64 } else { self.prec };
                let list: Vec<String> = (v..end).map(|e| self.coeff(e).unwrap().to_string()).collect();
                write!(f, "v={v};N={n};coeffs={}", list.join(","))
            }
        }
    }
}

impl fmt::Debug for SkewLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&SkewLaurent> for &SkewLaurent {
            type Output = SkewLaurent;
            fn $method(self, rhs: &SkewLaurent) -> SkewLaurent {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<SkewLaurent> for SkewLaurent {
            type Output = SkewLaurent;
            fn $method(self, rhs: SkewLaurent) -> SkewLaurent {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&SkewLaurent> for SkewLaurent {
            type Output = SkewLaurent;
            fn $method(self, rhs: &SkewLaurent) -> SkewLaurent {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &SkewLaurent {
    type Output = SkewLaurent;
    fn neg(self) -> SkewLaurent {
        self.scale(-self.field.one())
    }
}

impl Neg for SkewLaurent {
    type Output = SkewLaurent;
    fn neg(self) -> SkewLaurent {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn twisted_product_in_f4() {
        let k = f(4);
        let w = k.element(2).unwrap();
        let wt = SkewLaurent::monomial(w, 1, 1);
        // ω·θ(ω) = ω^3 = 1
        assert_eq!(&wt * &wt, SkewLaurent::monomial(k.one(), 2, 1));
        // untwisted: ω^2 t^2
        let wt0 = SkewLaurent::monomial(w, 1, 0);
        assert_eq!(&wt0 * &wt0, SkewLaurent::monomial(w * w, 2, 0));
    }

    #[test]
    fn characteristic_two_cancellation() {
        let k = f(2);
        let x = SkewLaurent::from_terms(k, 0, [(0, k.one()), (1, k.one())], None);
        assert!((&x + &x).is_exact_zero());
    }

    #[test]
    fn geometric_series_inverse() {
        let k = f(2);
        let x = SkewLaurent::from_terms(k, 0, [(0, k.one()), (1, k.one())], Some(10));
        let y = x.inv().unwrap();
        // oracle: 1/(1+t) = Σ t^i in characteristic 2
        let expected = SkewLaurent::from_terms(k, 0, (0..10).map(|i| (i, k.one())), Some(10));
        assert_eq!(y, expected);
        let back = &x * &y;
        assert_eq!(back.valuation(), Some(0));
        assert_eq!(back.truncate(10), SkewLaurent::one(k, 0).truncate(10));
    }

    #[test]
    fn monomial_inverses() {
        let k = f(4);
        let w = k.element(2).unwrap();
        let wt = SkewLaurent::monomial(w, 1, 1);
        let inv = wt.inv().unwrap();
        // (ωt)^{-1} = t^{-1} ω^{-1} = θ^{-1}(ω^2) t^{-1} = ω t^{-1}
        assert_eq!(inv, SkewLaurent::monomial(w, -1, 1));
        assert_eq!(&inv * &wt, SkewLaurent::one(k, 1));
        assert_eq!(&wt * &inv, SkewLaurent::one(k, 1));
        let t = SkewLaurent::t(k, 0);
        assert_eq!(t.inv().unwrap(), SkewLaurent::monomial(k.one(), -1, 0));
    }

    #[test]
    fn inverse_errors() {
        let k = f(3);
        assert_eq!(SkewLaurent::zero(k, 0).inv().unwrap_err(), SeriesError::ZeroInverse);
        assert_eq!(SkewLaurent::zero_to(k, 0, 5).inv().unwrap_err(), SeriesError::Undetermined(5));
        let x = SkewLaurent::from_terms(k, 0, [(0, k.one()), (1, k.one())], None);
        assert_eq!(x.inv().unwrap_err(), SeriesError::InfiniteInverse);
    }

    #[test]
    fn precision_propagation() {
        let k = f(3);
        let a = SkewLaurent::from_terms(k, 0, [(-2, k.one())], Some(5));
        let b = SkewLaurent::from_terms(k, 0, [(1, k.one())], Some(3));
        // a*b known below min(5 + 1, 3 - 2) = 1
        assert_eq!((&a * &b).precision(), Precision::Absolute(1));
        assert_eq!((&a + &b).precision(), Precision::Absolute(3));
        let inv = a.inv().unwrap();
        assert_eq!(inv.valuation(), Some(2));
        assert_eq!(inv.precision(), Precision::Absolute(9));
    }

    #[test]
    fn zero_to_precision_differs_from_exact_zero() {
        let k = f(5);
        let x = SkewLaurent::from_terms(k, 0, [(0, k.one())], Some(4));
        let d = &x - &x;
        assert!(!d.is_exact_zero());
        assert!(d.is_known_zero());
        assert_eq!(d.valuation_at_least(4), Some(true));
        assert_eq!(d.valuation_at_least(5), None);
        assert_ne!(d, SkewLaurent::zero(k, 0));
    }

    #[test]
    fn star_examples() {
        let k = f(4);
        let w = k.element(2).unwrap();
        let c = SkewLaurent::constant(w, 1);
        assert_eq!(c.star(true).unwrap(), SkewLaurent::constant(w * w, 1));
        let t = SkewLaurent::t(k, 1);
        assert_eq!(t.star(true).unwrap(), t);
        assert_eq!(t.star(false).unwrap(), t);
        let k8 = f(8);
        assert!(matches!(SkewLaurent::t(k8, 1).star(false), Err(SeriesError::TwistOrder { .. })));
    }

    #[test]
    fn text_roundtrip() {
        let k = f(9);
        let x = SkewLaurent::from_terms(k, 0, [(-1, k.element(4).unwrap()), (2, k.element(7).unwrap())], Some(4));
        let s = x.to_string();
        assert_eq!(s, "v=-1;N=4;coeffs=4,0,0,7,0");
        assert_eq!(SkewLaurent::parse(k, 0, &s).unwrap(), x);
        let z = SkewLaurent::zero_to(k, 0, 3);
        assert_eq!(SkewLaurent::parse(k, 0, &z.to_string()).unwrap(), z);
        let e = SkewLaurent::monomial(k.one(), 3, 0);
        assert_eq!(e.to_string(), "v=3;N=inf;coeffs=1");
        assert!(SkewLaurent::parse(k, 0, "v=0;N=2;coeffs=0,1").is_err());
    }
}
