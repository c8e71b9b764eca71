use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::set::{Carrier, MoufangSet, Point, Tolerance};
use crate::algebra::{Field, FieldError, Fq, SkewLaurent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("malformed instance spec {0:?}; expected e.g. ff:q=5, laurent:q=4,theta=1, hermitian:q=4,theta=1,sigma=theta")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("the involution needs θ² = id, but θ = Frob^{theta} on F_{q}")]
    TwistOrder { q: u64, theta: u32 },
    #[error("{0} is not available for this instance kind")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    FiniteField,
    Laurent,
    Hermitian { sigma_is_theta: bool },
}

/// Parsed instance string such as `laurent:q=4,theta=1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub q: u64,
    pub theta: u32,
}

impl FromStr for InstanceSpec {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InstanceError::Malformed(s.to_string());
        let (kind, params) = s.trim().split_once(':').ok_or_else(bad)?;
        let (mut q, mut theta, mut sigma) = (None, 0u32, None);
        for kv in params.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            match k.trim() {
                "q" => q = Some(v.trim().parse::<u64>().map_err(|_| bad())?),
                "theta" => theta = v.trim().parse().map_err(|_| bad())?,
                "sigma" => sigma = Some(v.trim().to_string()),
                _ => return Err(bad()),
            }
        }
        let q = q.ok_or_else(bad)?;
        let field = Field::of_order(q)?;
        let kind = match (kind.trim(), sigma.as_deref()) {
            ("ff", None) if theta == 0 => InstanceKind::FiniteField,
            ("laurent", None) => InstanceKind::Laurent,
            ("hermitian", Some(sg @ ("id" | "theta"))) => {
                if (2 * theta) % field.degree() != 0 {
                    return Err(InstanceError::TwistOrder { q, theta });
                }
                InstanceKind::Hermitian { sigma_is_theta: sg == "theta" }
            }
            _ => return Err(bad()),
        };
        Ok(InstanceSpec { kind, q, theta: theta % field.degree() })
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            InstanceKind::FiniteField => write!(f, "ff:q={}", self.q),
            InstanceKind::Laurent if self.theta == 0 => write!(f, "laurent:q={}", self.q),
            InstanceKind::Laurent => write!(f, "laurent:q={},theta={}", self.q, self.theta),
            InstanceKind::Hermitian { sigma_is_theta } => {
                let s = if sigma_is_theta { "theta" } else { "id" };
                write!(f, "hermitian:q={},theta={},sigma={s}", self.q, self.theta)
            }
        }
    }
}

/// Deterministic per-case generator derived from the seed, a tag and an index.
pub fn case_rng(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// What an identity checker needs from an instance.
pub trait Domain: Sync {
    type Elem: Carrier;
    fn label(&self) -> String;
    /// The Moufang set with its standard `τ = μ_1`.
    fn set(&self) -> &MoufangSet<Self::Elem>;
    fn tolerance(&self) -> Tolerance;
    /// Every element of `U`, if `U` is finite.
    fn exhaustive(&self) -> Option<Vec<Self::Elem>>;
    /// A random nonzero element.
    fn random_nonzero(&self, rng: &mut ChaCha8Rng) -> Self::Elem;
}

/// `M(F_q)`.
#[derive(Clone, Debug)]
pub struct FiniteDomain {
    field: Field,
    set: MoufangSet<Fq>,
}

impl FiniteDomain {
    pub fn new(field: Field) -> Self {
        FiniteDomain { field, set: MoufangSet::new(field.one()).expect("1 is invertible") }
    }

    pub fn field(&self) -> Field {
        self.field
    }
}

impl Domain for FiniteDomain {
    type Elem = Fq;
    fn label(&self) -> String {
        format!("ff:q={}", self.field.order())
    }
    fn set(&self) -> &MoufangSet<Fq> {
        &self.set
    }
    fn tolerance(&self) -> Tolerance {
        Tolerance::EXACT
    }
    fn exhaustive(&self) -> Option<Vec<Fq>> {
        Some(self.field.elements().collect())
    }
    fn random_nonzero(&self, rng: &mut ChaCha8Rng) -> Fq {
        self.field.element(rng.gen_range(1..self.field.order() as u64)).unwrap()
    }
}

/// `M(K((t))_θ)` or its Hermitian subspace. Samples are exact polynomials
/// with `N` random coefficients and inverses are taken to relative
/// precision `N`.
#[derive(Clone, Debug)]
pub struct SeriesDomain {
    spec: InstanceSpec,
    field: Field,
    precision: i64,
    window: (i64, i64),
    set: MoufangSet<SkewLaurent>,
}

/// Valuation window used by randomized sampling.
pub const DEFAULT_WINDOW: (i64, i64) = (-3, 4);

impl SeriesDomain {
    pub fn new(spec: InstanceSpec, precision: i64) -> Result<Self, InstanceError> {
        if spec.kind == InstanceKind::FiniteField {
            return Err(InstanceError::Unsupported("series arithmetic".into()));
        }
        let field = Field::of_order(spec.q)?;
        let set = MoufangSet::with_precision(SkewLaurent::one(field, spec.theta), Some(precision)).expect("1 is invertible");
        Ok(SeriesDomain { spec, field, precision, window: DEFAULT_WINDOW, set })
    }

    pub fn spec(&self) -> InstanceSpec {
        self.spec
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn twist(&self) -> u32 {
        self.spec.theta
    }

    /// Relative working precision `N`.
    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn with_window(mut self, window: (i64, i64)) -> Self {
        self.window = window;
        self
    }

    pub fn is_hermitian(&self) -> bool {
        matches!(self.spec.kind, InstanceKind::Hermitian { .. })
    }

    pub fn monomial(&self, c: Fq, e: i64) -> SkewLaurent {
        SkewLaurent::monomial(c, e, self.spec.theta)
    }

    pub fn one(&self) -> SkewLaurent {
        SkewLaurent::one(self.field, self.spec.theta)
    }

    pub fn zero(&self) -> SkewLaurent {
        SkewLaurent::zero(self.field, self.spec.theta)
    }

    /// Exact series from terms.
    pub fn poly(&self, terms: &[(i64, Fq)]) -> SkewLaurent {
        SkewLaurent::from_terms(self.field, self.spec.theta, terms.iter().copied(), None)
    }

    /// Coefficients allowed at exponent `e` (all of `K`, or the part fixed by
    /// `θ^e σ` in the Hermitian kind).
    pub fn allowed(&self, e: i64) -> Vec<Fq> {
        match self.spec.kind {
            InstanceKind::Hermitian { sigma_is_theta } => {
                let s = e + sigma_is_theta as i64;
                self.field.elements().filter(|c| c.frobenius(self.spec.theta as i64 * s) == *c).collect()
            }
            _ => self.field.elements().collect(),
        }
    }

    /// Order of `U_n / U_{n+1}`.
    pub fn quotient_order(&self, n: i64) -> usize {
        self.allowed(n).len()
    }

    pub fn is_symmetric(&self, x: &SkewLaurent) -> bool {
        match self.spec.kind {
            InstanceKind::Hermitian { sigma_is_theta } => x.star(sigma_is_theta).map(|s| &s == x).unwrap_or(false),
            _ => true,
        }
    }

    /// `M(U, μ_e)` with this domain's working precision.
    pub fn moufang_set(&self, e: SkewLaurent) -> Option<MoufangSet<SkewLaurent>> {
        MoufangSet::with_precision(e, Some(self.precision))
    }

    /// Random exact polynomial with valuation exactly `v` and `N` random
    /// coefficients at exponents `v..v + N`.
    pub fn sample_at(&self, rng: &mut ChaCha8Rng, v: i64) -> SkewLaurent {
        let mut terms = Vec::with_capacity(self.precision as usize);
        for e in v..v + self.precision {
            let allowed = self.allowed(e);
            let c = if e == v {
                let nz: Vec<Fq> = allowed.into_iter().filter(|c| !c.is_zero()).collect();
                nz[rng.gen_range(0..nz.len())]
            } else {
                allowed[rng.gen_range(0..allowed.len())]
            };
            terms.push((e, c));
        }
        SkewLaurent::from_terms(self.field, self.spec.theta, terms, None)
    }

    /// Random element with valuation at least `m` (drawn from `m..=m+2`).
    pub fn sample_at_least(&self, rng: &mut ChaCha8Rng, m: i64) -> SkewLaurent {
        let v = rng.gen_range(m..=m + 2);
        self.sample_at(rng, v)
    }

    pub fn random_valuation(&self, rng: &mut ChaCha8Rng) -> i64 {
        rng.gen_range(self.window.0..=self.window.1)
    }
}

impl Domain for SeriesDomain {
    type Elem = SkewLaurent;
    fn label(&self) -> String {
        self.spec.to_string()
    }
    fn set(&self) -> &MoufangSet<SkewLaurent> {
        &self.set
    }
    fn tolerance(&self) -> Tolerance {
        Tolerance::digits((self.precision / 2).max(1))
    }
    fn exhaustive(&self) -> Option<Vec<SkewLaurent>> {
        None
    }
    fn random_nonzero(&self, rng: &mut ChaCha8Rng) -> SkewLaurent {
        let v = self.random_valuation(rng);
        self.sample_at(rng, v)
    }
}

/// Either kind of instance behind one spec string.
#[derive(Clone, Debug)]
pub enum Instance {
    Finite(FiniteDomain),
    Series(SeriesDomain),
}

impl Instance {
    pub fn build(spec: InstanceSpec, precision: i64) -> Result<Self, InstanceError> {
        match spec.kind {
            InstanceKind::FiniteField => Ok(Instance::Finite(FiniteDomain::new(Field::of_order(spec.q)?))),
            _ => Ok(Instance::Series(SeriesDomain::new(spec, precision)?)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Instance::Finite(d) => d.label(),
            Instance::Series(d) => d.label(),
        }
    }
}

/// Random point: `0`, `∞`, or a random nonzero element.
pub fn random_point<D: Domain>(dom: &D, rng: &mut ChaCha8Rng) -> Point<D::Elem> {
    match rng.gen_range(0..8) {
        0 => Point::Inf,
        1 => Point::Fin(dom.set().zero()),
        _ => Point::Fin(dom.random_nonzero(rng)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing() {
        for s in ["ff:q=5", "laurent:q=3", "laurent:q=4,theta=1", "hermitian:q=4,theta=1,sigma=theta", "hermitian:q=9,theta=1,sigma=id"] {
            let spec: InstanceSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        let err = "ff:q=6".parse::<InstanceSpec>().unwrap_err();
        assert_eq!(err.to_string(), "6 is not a prime power");
        assert!("laurent:q=3,zeta=1".parse::<InstanceSpec>().is_err());
        assert!(matches!("hermitian:q=8,theta=1,sigma=id".parse::<InstanceSpec>(), Err(InstanceError::TwistOrder { .. })));
    }

    #[test]
    fn hermitian_samples_are_symmetric() {
        let d = SeriesDomain::new("hermitian:q=4,theta=1,sigma=theta".parse().unwrap(), 8).unwrap();
        let mut rng = case_rng(0, "sym", 0);
        for _ in 0..20 {
            let x = d.random_nonzero(&mut rng);
            assert!(d.is_symmetric(&x), "{x}");
        }
        // even exponents carry F_2 coefficients, odd ones all of F_4
        assert_eq!(d.quotient_order(0), 2);
        assert_eq!(d.quotient_order(1), 4);
    }

    #[test]
    fn case_rngs_are_reproducible() {
        let a: u64 = case_rng(7, "tau", 3).gen();
        let b: u64 = case_rng(7, "tau", 3).gen();
        let c: u64 = case_rng(7, "tau", 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
