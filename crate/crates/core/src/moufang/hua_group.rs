//! Finite root subgroups `V ≤ U`, the group `⟨μ_a μ_b : a, b ∈ V^#⟩` acting
//! on `V`, and the structure of the Hua group on `U_n / U_{n+2}`.

use thiserror::Error;

use super::instance::{Domain, SeriesDomain};
use super::set::{Agreement, Carrier, MoufangSet, Point, Tolerance};
use crate::algebra::{Fq, SkewLaurent};
use crate::perm::{closure, is_abelian, is_cyclic, Perm};
use crate::report::{CaseOutcome, LemmaReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootSubgroupError {
    #[error("V must contain 0 and at least one nonzero element")]
    Degenerate,
    #[error("V is not closed under addition: {a} + {b}")]
    NotSubgroup { a: String, b: String },
    #[error("{v} μ_{a} = {image} leaves V")]
    NotClosed { v: String, a: String, image: String },
    #[error("membership of {0} in V is undecided at this precision")]
    Undetermined(String),
}

/// A finite subset of `U` with index lookup up to a tolerance.
pub struct Subset<'a, C> {
    elems: &'a [C],
    tol: Tolerance,
}

impl<'a, C: Carrier> Subset<'a, C> {
    pub fn new(elems: &'a [C], tol: Tolerance) -> Self {
        Subset { elems, tol }
    }

    pub fn index_of(&self, x: &C) -> Result<Option<usize>, RootSubgroupError> {
        let mut undecided = false;
        for (i, v) in self.elems.iter().enumerate() {
            match v.agree(x, self.tol) {
                Agreement::Equal => return Ok(Some(i)),
                Agreement::Undecided => undecided = true,
                Agreement::Different => {}
            }
        }
        if undecided {
            Err(RootSubgroupError::Undetermined(x.to_string()))
        } else {
            Ok(None)
        }
    }

    fn zero(&self) -> Result<usize, RootSubgroupError> {
        let z = self.elems.first().ok_or(RootSubgroupError::Degenerate)?.zero_of();
        self.index_of(&z)?.ok_or(RootSubgroupError::Degenerate)
    }
}

/// `H_0 = ⟨μ_a μ_b : a, b ∈ V^#⟩` restricted to `V`.
#[derive(Debug, Clone)]
pub struct HuaGroup {
    /// Permutations of the indices of `V`.
    pub group: Vec<Perm>,
    pub cyclic: bool,
    /// `|(F*)²|` for `|F| = |V|`.
    pub expected_order: usize,
}

impl HuaGroup {
    pub fn order(&self) -> usize {
        self.group.len()
    }

    pub fn matches_squares(&self) -> bool {
        self.cyclic && self.order() == self.expected_order
    }
}

/// `|(F_q*)²|`.
pub fn square_class_order(q: usize) -> usize {
    if q.is_multiple_of(2) {
        q - 1
    } else {
        (q - 1) / 2
    }
}

/// The permutation of `V` induced by `μ_a`, with `0` sent to itself.
fn mu_on_subset<C: Carrier>(set: &MoufangSet<C>, sub: &Subset<C>, a: &C, zero: usize) -> Result<Vec<u32>, RootSubgroupError> {
    sub.elems
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if i == zero {
                return Ok(zero as u32);
            }
            let image = match set.mu(a, &Point::Fin(v.clone())) {
                Ok(Point::Fin(y)) => y,
                _ => return Err(RootSubgroupError::Undetermined(v.to_string())),
            };
            sub.index_of(&image)?.map(|j| j as u32).ok_or_else(|| RootSubgroupError::NotClosed { v: v.to_string(), a: a.to_string(), image: image.to_string() })
        })
        .collect()
}

/// Checks that `V` is a subgroup closed under every `μ_a`, `a ∈ V^#`, and
/// returns the μ-permutations indexed like `V`.
pub fn root_subgroup_mus<C: Carrier>(set: &MoufangSet<C>, v: &[C], tol: Tolerance) -> Result<Vec<Option<Perm>>, RootSubgroupError> {
    let sub = Subset::new(v, tol);
    let zero = sub.zero()?;
    if v.len() < 2 {
        return Err(RootSubgroupError::Degenerate);
    }
    for a in v {
        for b in v {
            if sub.index_of(&a.add(b))?.is_none() {
                return Err(RootSubgroupError::NotSubgroup { a: a.to_string(), b: b.to_string() });
            }
        }
    }
    v.iter()
        .enumerate()
        .map(|(i, a)| {
            if i == zero {
                return Ok(None);
            }
            let images = mu_on_subset(set, &sub, a, zero)?;
            Ok(Some(Perm::from_images(images).expect("μ_a is injective")))
        })
        .collect()
}

/// `H_0` acting on the root subgroup `V`.
pub fn hua_root_subgroup_group<C: Carrier>(set: &MoufangSet<C>, v: &[C], tol: Tolerance) -> Result<HuaGroup, RootSubgroupError> {
    let mus: Vec<Perm> = root_subgroup_mus(set, v, tol)?.into_iter().flatten().collect();
    let gens: Vec<Perm> = mus.iter().flat_map(|a| mus.iter().map(move |b| a.then(b))).collect();
    let group = closure(v.len(), &gens, usize::MAX).expect("unbounded");
    Ok(HuaGroup { cyclic: is_cyclic(&group), group, expected_order: square_class_order(v.len()) })
}

/// Report form of [`hua_root_subgroup_group`].
pub fn check_root_subgroup_group<D: Domain>(dom: &D, v: &[D::Elem]) -> LemmaReport {
    let inputs = || format!("|V|={}", v.len());
    let outcome = match hua_root_subgroup_group(dom.set(), v, dom.tolerance()) {
        Ok(h) => CaseOutcome::check(
            h.matches_squares(),
            inputs,
            || format!("order {} cyclic={}", h.order(), h.cyclic),
            || format!("cyclic of order {}", h.expected_order),
        ),
        Err(RootSubgroupError::Undetermined(x)) => CaseOutcome::undecided(inputs(), x, "membership"),
        Err(e) => CaseOutcome::fail(inputs(), e.to_string(), "root subgroup"),
    };
    LemmaReport::single(dom.label(), "root-subgroup-hua-group", outcome)
}

/// Facts about `ℋ`, the Hua group `⟨h_a : a ∈ U_n \ U_{n+1}⟩` acting on
/// `U_n / U_{n+2}`, and its kernel `ℋ_0` on `U_n / U_{n+1}`.
#[derive(Debug, Clone)]
pub struct HuaStructure {
    pub order: usize,
    pub kernel_order: usize,
    pub kernel_normal: bool,
    pub kernel_elementary_abelian: bool,
    pub quotient_cyclic: bool,
    pub expected_quotient: usize,
}

/// Builds `ℋ` on `U_n / U_{n+2}` from `h_a = μ_e μ_a` with `e = t^n` and `a`
/// running over the representatives `c t^n + d t^{n+1}`, `c ≠ 0`.
pub fn hua_structure(dom: &SeriesDomain, n: i64) -> Result<HuaStructure, String> {
    let (c0, c1) = (dom.allowed(n), dom.allowed(n + 1));
    let reps: Vec<(Fq, Fq)> = c0.iter().flat_map(|&a| c1.iter().map(move |&b| (a, b))).collect();
    let elem = |&(a, b): &(Fq, Fq)| dom.poly(&[(n, a), (n + 1, b)]);
    let index = |x: &SkewLaurent| -> Result<usize, String> {
        if x.valuation_at_least(n) != Some(true) {
            return Err(format!("{x} leaves U_{n}"));
        }
        let (a, b) = (x.coeff(n), x.coeff(n + 1));
        let (Some(a), Some(b)) = (a, b) else { return Err(format!("{x} undetermined mod U_{}", n + 2)) };
        reps.iter().position(|&r| r == (a, b)).ok_or_else(|| format!("{x} has disallowed coefficients"))
    };
    let set = dom.moufang_set(dom.monomial(dom.field().one(), n)).expect("t^n is invertible");
    let mut gens = Vec::new();
    for a in reps.iter().filter(|r| !r.0.is_zero()) {
        let a = elem(a);
        let images = reps
            .iter()
            .map(|x| {
                let y = set.hua(&a, &elem(x)).map_err(|_| format!("h_{a} undetermined"))?;
                index(&y).map(|i| i as u32)
            })
            .collect::<Result<Vec<_>, _>>()?;
        gens.push(Perm::from_images(images).ok_or("Hua map not bijective mod U_{n+2}")?);
    }
    let degree = reps.len();
    let group = closure(degree, &gens, 1 << 20).ok_or("Hua group too large")?;
    // Induced map on U_n/U_{n+1}, read off the representatives c t^n.
    let q0 = c0.len();
    let base: Vec<usize> = c0.iter().map(|&c| reps.iter().position(|r| *r == (c, c1[0])).expect("representative")).collect();
    let top_of = |g: &Perm| {
        let img = base.iter().map(|&i| c0.iter().position(|&c| c == reps[g.image(i)].0).expect("coset") as u32).collect();
        Perm::from_images(img).expect("Hua maps permute U_n/U_{n+1}")
    };
    let kernel: Vec<Perm> = group.iter().filter(|g| top_of(g) == Perm::identity(q0)).cloned().collect();
    let p = dom.field().characteristic() as usize;
    let kernel_set: std::collections::HashSet<&Perm> = kernel.iter().collect();
    let kernel_normal = group.iter().all(|g| kernel.iter().all(|k| kernel_set.contains(&k.conjugate_by(g))));
    let kernel_elementary_abelian = is_abelian(&kernel) && kernel.iter().all(|k| k.order() == 1 || k.order() == p);
    let mut top: Vec<Perm> = group.iter().map(top_of).collect();
    top.sort();
    top.dedup();
    Ok(HuaStructure {
        order: group.len(),
        kernel_order: kernel.len(),
        kernel_normal,
        kernel_elementary_abelian,
        quotient_cyclic: is_cyclic(&top) && top.len() * kernel.len() == group.len(),
        expected_quotient: square_class_order(c0.len()),
    })
}

pub fn check_hua_structure(dom: &SeriesDomain, n: i64) -> LemmaReport {
    let inputs = || format!("n={n}");
    let outcome = match hua_structure(dom, n) {
        Ok(s) => CaseOutcome::check(
            s.kernel_normal && s.kernel_elementary_abelian && s.quotient_cyclic && s.order == s.kernel_order * s.expected_quotient,
            inputs,
            || format!("{s:?}"),
            || format!("normal elementary abelian kernel, cyclic quotient of order {}", s.expected_quotient),
        ),
        Err(e) => CaseOutcome::undecided(inputs(), e, "Hua group on U_n/U_{n+2}"),
    };
    LemmaReport::single(dom.label(), format!("hua-group-structure(n={n})"), outcome)
}
