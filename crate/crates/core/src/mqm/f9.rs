//! Subfields of order 9 in `Mat_2(F_3)` and the map `x ↦ x³ε` in
//! `End_{F_3}(F_9)`.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::matrix::FpMatrix;
use crate::algebra::Field;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct F9Report {
    pub matrices: usize,
    pub invertible: usize,
    /// Subrings of `Mat_2(F_3)` that are fields with 9 elements.
    pub subfields: usize,
    /// Subfields whose groups of nonzero squares normalize those of all the others.
    pub mutually_normalizing: usize,
    /// Size of the subring generated by `x ↦ x³ε`, `ε` of order 8.
    pub witness_ring_size: usize,
    pub witness_ring_is_field: bool,
}

impl F9Report {
    pub fn ok(&self) -> bool {
        self.matrices == 81 && self.invertible == 48 && self.mutually_normalizing == 3 && self.witness_ring_size == 9 && self.witness_ring_is_field
    }
}

/// The subring generated by the identity and `gens`.
pub fn generated_subring(gens: &[FpMatrix]) -> BTreeSet<FpMatrix> {
    let Some(first) = gens.first() else { return BTreeSet::new() };
    let (p, n) = (first.characteristic(), first.dim());
    let mut ring: BTreeSet<FpMatrix> = BTreeSet::from([FpMatrix::zero(p, n), FpMatrix::identity(p, n)]);
    ring.extend(gens.iter().cloned());
    loop {
        let elems: Vec<FpMatrix> = ring.iter().cloned().collect();
        let before = ring.len();
        for a in &elems {
            for b in &elems {
                ring.insert(a + b);
                ring.insert(a * b);
            }
        }
        if ring.len() == before {
            return ring;
        }
    }
}

/// Commutative with every nonzero element invertible.
pub fn is_field(ring: &BTreeSet<FpMatrix>) -> bool {
    ring.iter().all(|a| a.is_zero() || a.is_invertible()) && ring.iter().all(|a| ring.iter().all(|b| a * b == b * a))
}

fn nonzero_squares(field: &BTreeSet<FpMatrix>) -> HashSet<FpMatrix> {
    field.iter().filter(|a| !a.is_zero()).map(|a| a * a).collect()
}

fn inverse(a: &FpMatrix) -> FpMatrix {
    // The unit group of Mat_2(F_3) has exponent 24.
    a.pow(23)
}

pub fn f9_structure_check() -> F9Report {
    let all: Vec<FpMatrix> = FpMatrix::all(3, 2).collect();
    let invertible = all.iter().filter(|m| m.is_invertible()).count();
    let mut fields: BTreeSet<BTreeSet<FpMatrix>> = BTreeSet::new();
    for a in &all {
        let ring = generated_subring(std::slice::from_ref(a));
        if ring.len() == 9 && is_field(&ring) {
            fields.insert(ring);
        }
    }
    let squares: Vec<HashSet<FpMatrix>> = fields.iter().map(nonzero_squares).collect();
    let normalizes = |s: &HashSet<FpMatrix>, t: &HashSet<FpMatrix>| s.iter().all(|g| t.iter().all(|x| t.contains(&(&(&inverse(g) * x) * g))));
    let mutually_normalizing = (0..squares.len()).filter(|&i| (0..squares.len()).all(|j| normalizes(&squares[i], &squares[j]))).count();

    let f9 = Field::of_order(9).expect("F_9");
    let eps = f9.generator();
    let phi = FpMatrix::of_linear_map(f9, |x| x.pow(3) * eps);
    let ring = generated_subring(&[phi]);
    F9Report {
        matrices: all.len(),
        invertible,
        subfields: fields.len(),
        mutually_normalizing,
        witness_ring_size: ring.len(),
        witness_ring_is_field: is_field(&ring),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_mutually_normalizing_subfields() {
        let r = f9_structure_check();
        assert_eq!(r.subfields, 3);
        assert_eq!(r.mutually_normalizing, 3);
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn witness_squares_to_minus_one() {
        let f9 = Field::of_order(9).unwrap();
        let eps = f9.generator();
        assert_eq!(eps.order(), Some(8));
        let phi = FpMatrix::of_linear_map(f9, |x| x.pow(3) * eps);
        // (x³ε)³ε = x⁹ε⁴ = −x
        assert_eq!(phi.pow(2), FpMatrix::scalar(3, 2, 2));
    }
}
