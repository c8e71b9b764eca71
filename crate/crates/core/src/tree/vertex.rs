//! Vertices of the tree of `SL₂(F_q((t)))` as balls `c + t^n O` of `K`:
//! the vertex `(n, c)` is the lattice class spanned by the columns of
//! `[[t^n, c], [0, 1]]`, and `x_n = (n, 0)`.

use std::fmt;
use std::str::FromStr;

use super::mobius::Mobius;
use super::TreeError;
use crate::algebra::{Field, LaurentPolynomial};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TreeVertex {
    level: i64,
    /// Reduced representative: only exponents `< level`.
    c: LaurentPolynomial,
}

impl TreeVertex {
    /// `(n, c mod t^n O)`.
    pub fn new(level: i64, c: &LaurentPolynomial) -> Self {
        let lo = c.low_degree().unwrap_or(level).min(level);
        TreeVertex { level, c: c.restrict(lo, level) }
    }

    /// The apartment vertex `x_n`.
    pub fn apartment(field: Field, n: i64) -> Self {
        TreeVertex { level: n, c: LaurentPolynomial::zero(field) }
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn representative(&self) -> &LaurentPolynomial {
        &self.c
    }

    pub fn field(&self) -> Field {
        self.c.field()
    }

    pub fn parity(&self) -> i64 {
        self.level.rem_euclid(2)
    }

    pub fn on_apartment(&self) -> bool {
        self.c.is_zero()
    }

    /// Lattice basis `[[t^n, c], [0, 1]]`.
    pub fn basis(&self) -> Mobius {
        let f = self.field();
        Mobius::exact([[LaurentPolynomial::monomial(f.one(), self.level), self.c.clone()], [LaurentPolynomial::zero(f), LaurentPolynomial::one(f)]])
    }

    /// The vertex one step toward `∞`.
    pub fn up(&self) -> TreeVertex {
        TreeVertex::new(self.level - 1, &self.c)
    }

    /// The `q` vertices one step away from `∞`, in field element order.
    pub fn down(&self) -> Vec<TreeVertex> {
        let f = self.field();
        f.elements().map(|d| TreeVertex { level: self.level + 1, c: &self.c + &LaurentPolynomial::monomial(d, self.level) }).collect()
    }

    /// Up neighbor first, then [`down`](Self::down).
    pub fn neighbors(&self) -> Vec<TreeVertex> {
        std::iter::once(self.up()).chain(self.down()).collect()
    }

    /// Level of the smallest ball containing both.
    fn join_level(&self, other: &TreeVertex) -> i64 {
        let diff = &self.c - &other.c;
        let m = self.level.min(other.level);
        diff.low_degree().map_or(m, |v| v.min(m))
    }

    pub fn distance(&self, other: &TreeVertex) -> u64 {
        let l = self.join_level(other);
        ((self.level - l) + (other.level - l)) as u64
    }

    /// The same distance read off the elementary divisors of the
    /// basis change `B_u⁻¹ B_v`: `v(det) − 2·min v(entry)`.
    pub fn distance_by_divisors(&self, other: &TreeVertex) -> u64 {
        let f = self.field();
        let inv = Mobius::exact([
            [LaurentPolynomial::monomial(f.one(), -self.level), (-&self.c).shift(-self.level)],
            [LaurentPolynomial::zero(f), LaurentPolynomial::one(f)],
        ]);
        let m = inv.compose(&other.basis());
        let min = m.entries().iter().flatten().filter_map(|e| e.valuation()).min().expect("invertible");
        let det = m.determinant().valuation().expect("invertible");
        (det - 2 * min) as u64
    }

    /// Vertices of the geodesic from `self` to `other`, both ends included.
    pub fn path_to(&self, other: &TreeVertex) -> Vec<TreeVertex> {
        let l = self.join_level(other);
        let mut path: Vec<TreeVertex> = (l..=self.level).rev().map(|m| TreeVertex::new(m, &self.c)).collect();
        path.extend((l + 1..=other.level).map(|m| TreeVertex::new(m, &other.c)));
        path
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.c.terms().map(|(e, c)| format!("{e}:{}", c.index())).collect();
        if terms.is_empty() {
            write!(f, "({})", self.level)
        } else {
            write!(f, "({}; {})", self.level, terms.join(", "))
        }
    }
}

impl fmt::Debug for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl TreeVertex {
    /// Parses `(n)` or `(n; e0:idx, e1:idx, ...)`.
    pub fn parse(field: Field, text: &str) -> Result<Self, TreeError> {
        let bad = || TreeError::Parse(text.to_string());
        let inner = text.trim().strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
        let (n, rest) = inner.split_once(';').unwrap_or((inner, ""));
        let level = i64::from_str(n.trim()).map_err(|_| bad())?;
        let mut terms = Vec::new();
        for t in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (e, c) = t.split_once(':').ok_or_else(bad)?;
            let e = i64::from_str(e.trim()).map_err(|_| bad())?;
            let c = c.trim().parse::<u64>().ok().and_then(|i| field.element(i).ok()).ok_or_else(bad)?;
            if e >= level {
                return Err(bad());
            }
            terms.push((e, c));
        }
        Ok(TreeVertex::new(level, &LaurentPolynomial::from_terms(field, terms)))
    }
}
