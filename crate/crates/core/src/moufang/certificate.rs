//! Certificates for a finite complement `V` of `U_{i+1}` in `U_i`: root
//! subgroup, direct-sum decomposition, cyclic `p'` Hua group, normalization.

use std::collections::HashSet;

use super::hua_group::{hua_root_subgroup_group, root_subgroup_mus, RootSubgroupError};
use super::instance::{case_rng, random_point, Domain, SeriesDomain};
use super::set::{Agreement, Point};
use crate::algebra::{Fq, SkewLaurent};
use crate::report::{CaseOutcome, LemmaReport};

/// `{c t^i : c allowed at exponent i}`.
pub fn coefficient_complement(dom: &SeriesDomain, i: i64) -> Vec<SkewLaurent> {
    dom.allowed(i).into_iter().map(|c| dom.monomial(c, i)).collect()
}

/// Random points used, besides `V ∪ {∞}`, to compare `μ_{ah}` with `μ_a^h`.
pub const NORMALIZATION_PROBES: usize = 4;

fn root_outcome<T>(r: &Result<T, RootSubgroupError>, inputs: &str) -> CaseOutcome {
    match r {
        Ok(_) => CaseOutcome::pass(),
        Err(RootSubgroupError::Undetermined(x)) => CaseOutcome::undecided(inputs, x.clone(), "membership in V"),
        Err(e) => CaseOutcome::fail(inputs, e.to_string(), "V is a root subgroup"),
    }
}

/// `V ≤ U_i` with `|V| = |U_i/U_{i+1}|` and distinct leading coefficients at `t^i`.
fn direct_sum(dom: &SeriesDomain, v: &[SkewLaurent], i: i64) -> CaseOutcome {
    let inputs = || format!("i={i} |V|={}", v.len());
    let expected = dom.quotient_order(i);
    if v.len() != expected {
        return CaseOutcome::fail(inputs(), format!("|V| = {}", v.len()), format!("|U_i/U_i+1| = {expected}"));
    }
    let mut leads: HashSet<Fq> = HashSet::new();
    for x in v {
        if x.is_exact_zero() {
            leads.insert(dom.field().zero());
            continue;
        }
        match (x.valuation_at_least(i), x.coeff(i)) {
            (Some(true), Some(c)) => {
                if !leads.insert(c) {
                    return CaseOutcome::fail(inputs(), format!("{x} meets U_{}", i + 1), "V ∩ U_{i+1} = 0");
                }
            }
            (Some(false), _) => return CaseOutcome::fail(inputs(), format!("{x} ∉ U_{i}"), "V ≤ U_i"),
            _ => return CaseOutcome::undecided(inputs(), x.to_string(), "valuation"),
        }
    }
    CaseOutcome::pass()
}

/// Checks the four properties, one report each.
pub fn verify_root_subgroup_certificate(dom: &SeriesDomain, v: &[SkewLaurent], i: i64, seed: u64) -> Vec<LemmaReport> {
    let label = dom.label();
    let set = dom.set();
    let tol = dom.tolerance();
    let p = dom.field().characteristic() as usize;
    let inputs = format!("i={i} V={}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    let name = |part: &str| format!("root-subgroup-certificate({part}, i={i})");

    let mus = root_subgroup_mus(set, v, tol);
    let mut reports = vec![LemmaReport::single(&label, name("i"), root_outcome(&mus, &inputs))];
    reports.push(LemmaReport::single(&label, name("ii"), direct_sum(dom, v, i)));

    let hua = hua_root_subgroup_group(set, v, tol);
    let cyclic = match &hua {
        Ok(h) => CaseOutcome::check(
            h.cyclic && h.order() % p != 0,
            || inputs.clone(),
            || format!("order {} cyclic={}", h.order(), h.cyclic),
            || format!("cyclic of order prime to {p}"),
        ),
        Err(_) => root_outcome(&hua, &inputs),
    };
    reports.push(LemmaReport::single(&label, name("iii"), cyclic));

    // μ_{ah} = μ_a^h for a ∈ V^# and h = μ_b μ_c with b, c ∈ V^#.
    let nonzero: Vec<&SkewLaurent> = v.iter().filter(|x| !x.is_exact_zero()).collect();
    let mut rng = case_rng(seed, "certificate", i as u64);
    let mut probes: Vec<Point<SkewLaurent>> = v.iter().cloned().map(Point::Fin).chain([Point::Inf]).collect();
    probes.extend((0..NORMALIZATION_PROBES).map(|_| random_point(dom, &mut rng)));
    let mut normal = LemmaReport::new(&label, name("iv"));
    if mus.is_ok() {
        for a in &nonzero {
            for b in &nonzero {
                for c in &nonzero {
                    normal.record(normalization_case(dom, a, b, c, &probes));
                }
            }
        }
    } else {
        normal.record(CaseOutcome::fail(&inputs, "V is not a root subgroup", "normalization"));
    }
    reports.push(normal);
    reports
}

fn normalization_case(dom: &SeriesDomain, a: &SkewLaurent, b: &SkewLaurent, c: &SkewLaurent, probes: &[Point<SkewLaurent>]) -> CaseOutcome {
    let set = dom.set();
    let tol = dom.tolerance();
    let inputs = || format!("a={a} b={b} c={c}");
    type Comparisons = Vec<(Point<SkewLaurent>, Point<SkewLaurent>, Agreement)>;
    let run = || -> Result<Comparisons, super::set::Undetermined> {
        let ah = match set.mu(c, &set.mu(b, &Point::Fin(a.clone()))?)? {
            Point::Fin(x) => x,
            Point::Inf => return Err(super::set::Undetermined),
        };
        probes
            .iter()
            .map(|x| {
                let lhs = set.mu(&ah, x)?;
                let y = set.mu(b, &set.mu(c, x)?)?;
                let rhs = set.mu(c, &set.mu(b, &set.mu(a, &y)?)?)?;
                let agreement = lhs.agree(&rhs, tol);
                Ok((lhs, rhs, agreement))
            })
            .collect()
    };
    match run() {
        Err(_) => CaseOutcome::undecided(inputs(), "undetermined", "μ_{ah}"),
        Ok(rows) => {
            if let Some((l, r, _)) = rows.iter().find(|r| r.2 == Agreement::Different) {
                CaseOutcome::fail(inputs(), l.to_string(), r.to_string())
            } else if let Some((l, r, _)) = rows.iter().find(|r| r.2 == Agreement::Undecided) {
                CaseOutcome::undecided(inputs(), l.to_string(), r.to_string())
            } else {
                CaseOutcome::pass()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(spec: &str) -> SeriesDomain {
        SeriesDomain::new(spec.parse().unwrap(), 10).unwrap()
    }

    #[test]
    fn coefficient_complements_pass() {
        for q in [2, 3, 5] {
            let d = dom(&format!("laurent:q={q}"));
            for i in [0, 1] {
                for r in verify_root_subgroup_certificate(&d, &coefficient_complement(&d, i), i, 0) {
                    assert!(r.clean(), "q={q} {r:?}");
                }
            }
        }
    }

    #[test]
    fn hua_group_order_on_f5_level_one() {
        let d = dom("laurent:q=5");
        let v = coefficient_complement(&d, 1);
        let h = hua_root_subgroup_group(d.set(), &v, d.tolerance()).unwrap();
        assert_eq!(h.order(), 2);
    }

    #[test]
    fn twisted_graph_is_not_a_root_subgroup() {
        // {c + c² t} is a subgroup in characteristic 2 whose μ-images leave it.
        let d = dom("laurent:q=4");
        let k = d.field();
        let v: Vec<SkewLaurent> = k.elements().map(|c| d.poly(&[(0, c), (1, c * c)])).collect();
        let reports = verify_root_subgroup_certificate(&d, &v, 0, 0);
        assert_eq!(reports[0].failed, 1, "{:?}", reports[0]);
        assert!(reports[1].clean());
    }

    #[test]
    fn linear_graph_over_f3_is_a_root_subgroup() {
        // {c(1 + t)}: μ_{a}(v) = −a² v⁻¹ stays on the line through 1 + t.
        let d = dom("laurent:q=3");
        let k = d.field();
        let v: Vec<SkewLaurent> = k.elements().map(|c| d.poly(&[(0, c), (1, c)])).collect();
        assert!(verify_root_subgroup_certificate(&d, &v, 0, 0)[0].clean());
    }
}
