//! Exhaustive scan of the condition `x⁻¹ x^σ ∈ Fix(σ)` for all nonzero
//! squares `x`, over every finite field up to a bound and every `σ ∈ Aut(F)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Field, Fq};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaloisWitness {
    /// `g` with `g²` violating the condition, `g` taken in power order of
    /// the canonical generator.
    pub root: u32,
    pub root_order: u32,
    pub square: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaloisCase {
    pub q: u32,
    /// `σ = Frob^k`.
    pub k: u32,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<GaloisWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaloisScan {
    pub bound: u32,
    pub fields: usize,
    pub cases: Vec<GaloisCase>,
}

impl GaloisScan {
    /// Cases with `σ ≠ 1` where the condition holds.
    pub fn exceptions(&self) -> Vec<(u32, u32)> {
        self.cases.iter().filter(|c| c.k != 0 && c.holds).map(|c| (c.q, c.k)).collect()
    }
}

fn condition_holds(x: Fq, k: i64) -> bool {
    let y = x.inv().expect("nonzero") * x.frobenius(k);
    y.frobenius(k) == y
}

pub fn check_field(field: Field, k: u32) -> GaloisCase {
    let n = field.order() as i64 - 1;
    let witness = (1..=n).map(|j| field.exp(j)).find(|g| !condition_holds(*g * *g, k as i64)).map(|g| GaloisWitness {
        root: g.index(),
        root_order: g.order().unwrap(),
        square: (g * g).index(),
    });
    GaloisCase { q: field.order(), k, holds: witness.is_none(), witness }
}

/// Every prime power `q ≤ bound`, every `σ = Frob^k`, `0 ≤ k < r`.
pub fn galois_lemma_scan(bound: u32) -> GaloisScan {
    let fields: Vec<Field> = (2..=bound as u64).filter_map(|q| Field::of_order(q).ok()).collect();
    let cases: Vec<GaloisCase> = fields.par_iter().flat_map_iter(|&f| (0..f.degree()).map(move |k| check_field(f, k))).collect();
    GaloisScan { bound, fields: fields.len(), cases }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f9_frobenius_is_the_exception() {
        let c = check_field(Field::of_order(9).unwrap(), 1);
        assert!(c.holds);
        // x ↦ x⁴ lands in F_3 for every x.
        let f9 = Field::of_order(9).unwrap();
        assert!(f9.elements().all(|x| x.pow(4).frobenius(1) == x.pow(4)));
    }

    #[test]
    fn f25_fails_at_a_generator() {
        let c = check_field(Field::of_order(25).unwrap(), 1);
        assert!(!c.holds);
        assert_eq!(c.witness.unwrap().root_order, 24);
    }

    #[test]
    fn trivial_sigma_always_holds() {
        for q in [2, 3, 4, 5, 8, 9, 16] {
            assert!(check_field(Field::of_order(q).unwrap(), 0).holds);
        }
    }

    #[test]
    fn scan_to_128_has_one_exception() {
        let s = galois_lemma_scan(128);
        assert_eq!(s.exceptions(), vec![(9, 1)]);
        // 2..=128 holds 31 primes and 13 proper prime powers.
        assert_eq!(s.fields, 44);
    }
}
