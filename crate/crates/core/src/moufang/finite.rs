//! Finite Moufang sets given by explicit permutation groups, and isomorphism
//! search between them.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::algebra::Field;
use crate::perm::{closure, Perm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoufangViolation {
    #[error("expected {expected} root groups on {degree} points, got {got}")]
    Shape { degree: usize, expected: usize, got: usize },
    #[error("root group at {point} has {size} elements, expected {expected}")]
    Order { point: usize, size: usize, expected: usize },
    #[error("root group at {point} moves its own point")]
    NotFixing { point: usize },
    #[error("root group at {point} is not regular on the remaining points")]
    NotRegular { point: usize },
    #[error("conjugating U_{point} by an element of U_{by} does not give a root group")]
    NotPermuted { point: usize, by: usize },
    #[error("the given τ does not swap the base points")]
    BadTau,
}

/// A Moufang set on `{0, .., n-1}`: one root group per point, each closed
/// under composition, fixing its point and regular on the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermMoufangSet {
    inf: usize,
    zero: usize,
    // Sorted, so equality of root groups is equality of vectors.
    root_groups: Vec<Vec<Perm>>,
}

fn sorted(mut g: Vec<Perm>) -> Vec<Perm> {
    g.sort();
    g.dedup();
    g
}

impl PermMoufangSet {
    pub fn new(inf: usize, zero: usize, root_groups: Vec<Vec<Perm>>) -> Result<Self, MoufangViolation> {
        let n = root_groups.len();
        if inf >= n || zero >= n || inf == zero {
            return Err(MoufangViolation::Shape { degree: n, expected: n, got: n });
        }
        for g in &root_groups {
            if g.iter().any(|p| p.degree() != n) {
                return Err(MoufangViolation::Shape { degree: n, expected: n, got: g.len() });
            }
        }
        let root_groups = root_groups.into_iter().map(sorted).collect();
        Ok(PermMoufangSet { inf, zero, root_groups })
    }

    /// `M(U_∞, τ)`: `U_0 = U_∞^τ` and `U_x = U_0^{u_x}` where `0 u_x = x`.
    pub fn from_tau(inf: usize, zero: usize, u_inf: Vec<Perm>, tau: &Perm) -> Result<Self, MoufangViolation> {
        let n = tau.degree();
        if tau.image(inf) != zero || tau.image(zero) != inf {
            return Err(MoufangViolation::BadTau);
        }
        let u_inf = sorted(u_inf);
        if u_inf.len() != n - 1 {
            return Err(MoufangViolation::Order { point: inf, size: u_inf.len(), expected: n - 1 });
        }
        let u_zero: Vec<Perm> = u_inf.iter().map(|u| u.conjugate_by(tau)).collect();
        let mut groups = vec![Vec::new(); n];
        for u in &u_inf {
            let x = u.image(zero);
            if x == inf || !groups[x].is_empty() {
                return Err(MoufangViolation::NotRegular { point: inf });
            }
            groups[x] = u_zero.iter().map(|g| g.conjugate_by(u)).collect();
        }
        groups[inf] = u_inf;
        Self::new(inf, zero, groups)
    }

    /// `M(F)`: points are element indices, `∞ = q`, `τ: x ↦ −x⁻¹`.
    pub fn of_field(field: Field) -> Self {
        let q = field.order() as usize;
        let elems: Vec<_> = field.elements().collect();
        let perm = |f: &dyn Fn(usize) -> usize| Perm::from_images((0..=q).map(|i| f(i) as u32).collect()).expect("bijection");
        let u_inf: Vec<Perm> = elems.iter().map(|&b| perm(&|i| if i == q { q } else { (elems[i] + b).index() as usize })).collect();
        let tau = perm(&|i| {
            if i == q {
                0
            } else {
                match elems[i].inv() {
                    Some(x) => (-x).index() as usize,
                    None => q,
                }
            }
        });
        Self::from_tau(q, 0, u_inf, &tau).expect("M(F) is a Moufang set")
    }

    pub fn degree(&self) -> usize {
        self.root_groups.len()
    }

    pub fn inf(&self) -> usize {
        self.inf
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn root_group(&self, p: usize) -> &[Perm] {
        &self.root_groups[p]
    }

    /// The element of `U_∞` taking `0` to `x`.
    fn translation_to(&self, x: usize) -> Option<&Perm> {
        self.root_groups[self.inf].iter().find(|u| u.image(self.zero) == x)
    }

    /// Checks the Moufang axioms.
    pub fn verify(&self) -> Result<(), MoufangViolation> {
        let n = self.degree();
        let index: HashMap<&[Perm], usize> = self.root_groups.iter().enumerate().map(|(i, g)| (g.as_slice(), i)).collect();
        for (p, g) in self.root_groups.iter().enumerate() {
            if g.len() != n - 1 {
                return Err(MoufangViolation::Order { point: p, size: g.len(), expected: n - 1 });
            }
            if g.iter().any(|u| !u.fixes(p)) {
                return Err(MoufangViolation::NotFixing { point: p });
            }
            let start = (p + 1) % n;
            let orbit: HashSet<usize> = g.iter().map(|u| u.image(start)).collect();
            if orbit.len() != n - 1 {
                return Err(MoufangViolation::NotRegular { point: p });
            }
        }
        for (by, g) in self.root_groups.iter().enumerate() {
            for u in g {
                for (p, h) in self.root_groups.iter().enumerate() {
                    let conj = sorted(h.iter().map(|x| x.conjugate_by(u)).collect());
                    if index.get(conj.as_slice()) != Some(&u.image(p)) {
                        return Err(MoufangViolation::NotPermuted { point: p, by });
                    }
                }
            }
        }
        Ok(())
    }

    /// `φ` maps root groups onto root groups: `U_p^φ = U'_{pφ}`.
    pub fn is_isomorphism(&self, other: &PermMoufangSet, phi: &Perm) -> bool {
        if phi.degree() != self.degree() || other.degree() != self.degree() {
            return false;
        }
        self.root_groups.iter().enumerate().all(|(p, g)| {
            let image = sorted(g.iter().map(|u| u.conjugate_by(phi)).collect());
            image == other.root_groups[phi.image(p)]
        })
    }

    /// An isomorphism onto `other` taking `∞ ↦ ∞'` and `0 ↦ 0'`, found by
    /// running over group isomorphisms `U_∞ → U'_∞`.
    pub fn find_isomorphism(&self, other: &PermMoufangSet) -> Option<Perm> {
        if self.degree() != other.degree() {
            return None;
        }
        let n = self.degree();
        let src = &self.root_groups[self.inf];
        let dst = &other.root_groups[other.inf];
        let gens = generating_set(src);
        let mut choice = vec![0usize; gens.len()];
        loop {
            let images: Vec<&Perm> = choice.iter().map(|&i| &dst[i]).collect();
            if let Some(psi) = extend_hom(&gens, &images, n) {
                let mut phi = vec![0u32; n];
                phi[self.inf] = other.inf as u32;
                let mut ok = true;
                for (u, v) in &psi {
                    phi[u.image(self.zero)] = v.image(other.zero) as u32;
                    ok &= u.image(self.zero) != self.inf;
                }
                if let Some(phi) = Perm::from_images(phi).filter(|_| ok) {
                    if self.is_isomorphism(other, &phi) {
                        return Some(phi);
                    }
                }
            }
            // Next tuple of generator images.
            let mut k = 0;
            loop {
                if k == choice.len() {
                    return None;
                }
                choice[k] += 1;
                if choice[k] < dst.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    /// Order of the group generated by all root groups, if at most `limit`.
    pub fn little_projective_group_order(&self, limit: usize) -> Option<usize> {
        let gens: Vec<Perm> = generating_set(&self.root_groups[self.inf]).into_iter().chain(generating_set(&self.root_groups[self.zero])).collect();
        closure(self.degree(), &gens, limit).map(|g| g.len())
    }

    /// `μ_x` for `x ≠ 0, ∞`: the unique element of `U_0 u_x U_0` swapping `0` and `∞`.
    pub fn mu(&self, x: usize) -> Option<Perm> {
        let ux = self.translation_to(x)?;
        let u0 = &self.root_groups[self.zero];
        u0.iter().flat_map(|a| u0.iter().map(move |b| a.then(ux).then(b))).find(|m| m.image(self.zero) == self.inf && m.image(self.inf) == self.zero)
    }
}

/// Greedy generators: each element added is outside the span of the previous.
fn generating_set(group: &[Perm]) -> Vec<Perm> {
    let Some(first) = group.first() else { return Vec::new() };
    let n = first.degree();
    let mut gens: Vec<Perm> = Vec::new();
    let mut span: HashSet<Perm> = HashSet::from([Perm::identity(n)]);
    for g in group {
        if !span.contains(g) {
            gens.push(g.clone());
            span = closure(n, &gens, usize::MAX).expect("unbounded").into_iter().collect();
        }
    }
    gens
}

/// The homomorphism `⟨gens⟩ → ⟨images⟩` with `gens[i] ↦ images[i]`, if it
/// is well defined and injective.
fn extend_hom(gens: &[Perm], images: &[&Perm], n: usize) -> Option<Vec<(Perm, Perm)>> {
    let id = Perm::identity(n);
    let mut map: HashMap<Perm, Perm> = HashMap::from([(id.clone(), id.clone())]);
    let mut seen_images: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        let h = map[&g].clone();
        for (s, t) in gens.iter().zip(images) {
            let gs = g.then(s);
            let ht = h.then(t);
            match map.get(&gs) {
                Some(prev) if *prev != ht => return None,
                Some(_) => {}
                None => {
                    if !seen_images.insert(ht.clone()) {
                        return None;
                    }
                    map.insert(gs.clone(), ht);
                    queue.push_back(gs);
                }
            }
        }
    }
    Some(map.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_sets_are_moufang() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let m = PermMoufangSet::of_field(Field::of_order(q).unwrap());
            m.verify().unwrap_or_else(|e| panic!("q={q}: {e}"));
            assert_eq!(m.degree(), q as usize + 1);
        }
    }

    #[test]
    fn little_projective_group_orders() {
        // |PSL_2(q)| = q(q²−1)/gcd(2, q−1)
        for (q, order) in [(2, 6), (3, 12), (4, 60), (5, 60)] {
            let m = PermMoufangSet::of_field(Field::of_order(q).unwrap());
            assert_eq!(m.little_projective_group_order(10_000), Some(order), "q={q}");
        }
    }

    #[test]
    fn relabelled_copy_is_found() {
        let m = PermMoufangSet::of_field(Field::of_order(5).unwrap());
        // Relabel by x ↦ 2x on the finite points.
        let relabel = Perm::from_images(vec![0, 2, 4, 1, 3, 5]).unwrap();
        let groups: Vec<Vec<Perm>> = (0..6)
            .map(|p| {
                let src = relabel.inverse().image(p);
                m.root_group(src).iter().map(|u| u.conjugate_by(&relabel)).collect()
            })
            .collect();
        let copy = PermMoufangSet::new(5, 0, groups).unwrap();
        copy.verify().unwrap();
        let phi = m.find_isomorphism(&copy).unwrap();
        assert!(m.is_isomorphism(&copy, &phi));
        let other = PermMoufangSet::of_field(Field::of_order(4).unwrap());
        assert!(m.find_isomorphism(&other).is_none());
    }

    #[test]
    fn mu_swaps_base_points() {
        let m = PermMoufangSet::of_field(Field::of_order(5).unwrap());
        // μ_1 on M(F_5) is x ↦ −x⁻¹, so 2 ↦ 2.
        let mu = m.mu(1).unwrap();
        assert_eq!(mu.image(0), 5);
        assert_eq!(mu.image(2), 2);
        assert_eq!(mu.image(1), 4);
    }

    #[test]
    fn broken_root_groups_are_rejected() {
        let m = PermMoufangSet::of_field(Field::of_order(3).unwrap());
        let mut groups: Vec<Vec<Perm>> = (0..4).map(|p| m.root_group(p).to_vec()).collect();
        groups.swap(1, 2);
        let bad = PermMoufangSet::new(3, 0, groups).unwrap();
        assert!(bad.verify().is_err());
    }
}
