//! Classification of multiplicative quadratic maps between finite fields as
//! `q(a) = a^{φ_1} a^{φ_2}` for a unique unordered pair of embeddings.

use serde::Serialize;
use thiserror::Error;

use super::map::{MQMap, Table};
use super::matrix::FpMatrix;
use crate::algebra::{Field, Fq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MqmCase {
    /// Both embeddings land in `L`.
    PairOfEmbeddings,
    /// The embeddings land in a proper extension of `L`; `q` is a norm.
    NormForm,
}

/// `q(a) = ι(a)^{p^k} ι(a)^{p^l}` in `F_{p^target_degree}` for the canonical
/// embeddings of `K` and `L` there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub case: MqmCase,
    pub k: u32,
    pub l: u32,
    pub target_degree: u32,
    pub unique: bool,
    /// `q` is additive (characteristic 2 only).
    pub monomorphism: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("map fails the axioms: {0}")]
    Invalid(String),
    #[error("no pair of embeddings reproduces the map")]
    NoPair,
    #[error("several pairs reproduce the map: {0:?}")]
    Multiple(Vec<(u32, u32)>),
    #[error("value at {0} is not a right multiplication of E")]
    NotRightMultiplication(usize),
}

fn lcm(a: u32, b: u32) -> u32 {
    let mut x = a;
    while !x.is_multiple_of(b) {
        x += a;
    }
    x
}

/// Canonical embedding of `k` into `m` (the identity when they coincide).
fn embedder(k: Field, m: Field) -> impl Fn(Fq) -> Fq {
    let emb = (k != m).then(|| k.embedding_into(m).expect("degree divides"));
    move |x| match &emb {
        Some(e) => e.apply(x),
        None => x,
    }
}

/// Reads an `End_{F_p}(E)`-valued map through `E ≅ {R_y}`, `y = 1·ψ`.
pub fn as_field_valued(m: &MQMap) -> Result<MQMap, ClassifyError> {
    match &m.table {
        Table::Field(_) => Ok(m.clone()),
        Table::End(t) => {
            let one = m.target.one();
            let values = t
                .iter()
                .enumerate()
                .map(|(i, mat)| {
                    let y = mat.apply(one);
                    if FpMatrix::right_mul(y) == *mat {
                        Ok(y)
                    } else {
                        Err(ClassifyError::NotRightMultiplication(i))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(MQMap::new(m.domain, m.target, Table::Field(values)).expect("same shape"))
        }
    }
}

/// All exponent pairs `0 ≤ k ≤ l < [K:F_p]` reproducing the map.
pub fn matching_pairs(m: &MQMap) -> Result<(u32, Vec<(u32, u32)>), ClassifyError> {
    let m = as_field_valued(m)?;
    let (rk, rl) = (m.domain.degree(), m.target.degree());
    let rm = lcm(rk, rl);
    let big = Field::new(m.domain.characteristic(), rm).expect("within bounds");
    let (iota, j) = (embedder(m.domain, big), embedder(m.target, big));
    let values: Vec<(Fq, Fq)> = m.domain.elements().map(|a| (iota(a), j(m.field_value(a).unwrap()))).collect();
    let mut pairs = Vec::new();
    for k in 0..rk {
        for l in k..rk {
            if values.iter().all(|&(x, y)| x.frobenius(k as i64) * x.frobenius(l as i64) == y) {
                pairs.push((k, l));
            }
        }
    }
    Ok((rm, pairs))
}

pub fn classify(m: &MQMap) -> Result<Classification, ClassifyError> {
    let verdict = m.verify();
    if !verdict.valid() {
        return Err(ClassifyError::Invalid(format!("{verdict:?}")));
    }
    let (target_degree, pairs) = matching_pairs(m)?;
    let (k, l) = match pairs.as_slice() {
        [] => return Err(ClassifyError::NoPair),
        [one] => *one,
        _ => return Err(ClassifyError::Multiple(pairs)),
    };
    let fm = as_field_valued(m)?;
    let case = if fm.target.degree() % fm.domain.degree() == 0 { MqmCase::PairOfEmbeddings } else { MqmCase::NormForm };
    let q = |a: Fq| fm.field_value(a).unwrap();
    let monomorphism = fm.domain.characteristic() == 2 && fm.domain.elements().all(|a| fm.domain.elements().all(|b| q(a + b) == q(a) + q(b)));
    Ok(Classification { case, k, l, target_degree, unique: true, monomorphism })
}

/// `a ↦ ι(a)^{p^k + p^l}` read back in `L`, if every value lies there.
pub fn pair_map(domain: Field, target: Field, k: u32, l: u32) -> Option<MQMap> {
    let big = Field::new(domain.characteristic(), lcm(domain.degree(), target.degree())).ok()?;
    let iota = embedder(domain, big);
    let back = (target != big).then(|| target.embedding_into(big).expect("degree divides"));
    let values = domain
        .elements()
        .map(|a| {
            let x = iota(a);
            let y = x.frobenius(k as i64) * x.frobenius(l as i64);
            match &back {
                Some(e) => e.preimage(y),
                None => Some(y),
            }
        })
        .collect::<Option<Vec<_>>>()?;
    MQMap::new(domain, target, Table::Field(values)).ok()
}

/// Result of classifying every map `a ↦ ι(a)^{p^k + p^l}` that lands in `L`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Sweep {
    pub maps: usize,
    pub failures: Vec<String>,
}

/// Runs over all `K`, `L` of equal characteristic with `|K| ≤ max_domain`,
/// `|L| ≤ max_target`, and all exponent pairs; each landing map must be valid
/// and classify back to its own pair, uniquely.
pub fn uniqueness_sweep(max_domain: u64, max_target: u64) -> Sweep {
    let fields = |bound: u64| (2..=bound).filter_map(|q| Field::of_order(q).ok()).collect::<Vec<_>>();
    let targets = fields(max_target);
    let mut sweep = Sweep::default();
    for k_field in fields(max_domain) {
        for &l_field in targets.iter().filter(|l| l.characteristic() == k_field.characteristic()) {
            for k in 0..k_field.degree() {
                for l in k..k_field.degree() {
                    let Some(m) = pair_map(k_field, l_field, k, l) else { continue };
                    sweep.maps += 1;
                    match classify(&m) {
                        Ok(c) if (c.k, c.l) == (k, l) && c.unique => {}
                        other => sweep.failures.push(format!("{k_field} -> {l_field} ({k},{l}): {other:?}")),
                    }
                }
            }
        }
    }
    sweep
}
