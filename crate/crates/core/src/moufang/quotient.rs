//! The finite Moufang set induced on `U_n / U_{n+1}` by `τ = μ_e` with
//! `e = t^n`.

use rayon::prelude::*;

use super::finite::PermMoufangSet;
use super::instance::{case_rng, Domain, SeriesDomain};
use super::set::Point;
use crate::algebra::{Field, Fq, SkewLaurent};
use crate::perm::Perm;
use crate::report::{CaseOutcome, LemmaReport};

/// `U_n / U_{n+1}` with cosets `c t^n` indexed like `cosets`, and `∞` last.
#[derive(Debug, Clone)]
pub struct LocalQuotient {
    pub level: i64,
    pub cosets: Vec<Fq>,
    pub tau_bar: Perm,
    pub set: PermMoufangSet,
}

impl LocalQuotient {
    pub fn order(&self) -> usize {
        self.cosets.len()
    }

    pub fn infinity(&self) -> usize {
        self.cosets.len()
    }
}

/// Per-level random perturbations used for the well-definedness check.
pub const PERTURBATIONS: usize = 8;

fn coset_of(cosets: &[Fq], x: &SkewLaurent, n: i64) -> Option<usize> {
    if !x.valuation_at_least(n)? {
        return None;
    }
    let c = x.coeff(n)?;
    cosets.iter().position(|&d| d == c)
}

/// Builds the quotient at level `n` and reports whether `τ̄` is well
/// defined on the sampled representatives.
pub fn local_quotient(dom: &SeriesDomain, n: i64, seed: u64) -> (Option<LocalQuotient>, LemmaReport) {
    let cosets = dom.allowed(n);
    let q = cosets.len();
    let e = dom.monomial(dom.field().one(), n);
    let set = dom.moufang_set(e).expect("t^n is invertible");
    let zero = cosets.iter().position(|c| c.is_zero()).expect("0 is a coset");
    let tag = format!("quotient:{n}");

    // Image coset of each nonzero coset under μ_e, and the check that
    // every perturbation c t^n + u with u ∈ U_{n+1} lands in the same coset.
    let rows: Vec<(Option<usize>, Vec<CaseOutcome>)> = (0..q)
        .into_par_iter()
        .map(|i| {
            if i == zero {
                return (Some(q), Vec::new());
            }
            let x = dom.monomial(cosets[i], n);
            let image = set.mu(set.unit(), &Point::Fin(x.clone())).ok().and_then(|p| p.finite().cloned());
            let target = image.as_ref().and_then(|y| coset_of(&cosets, y, n));
            let mut rng = case_rng(seed, &tag, i as u64);
            let outcomes = (0..PERTURBATIONS)
                .map(|_| {
                    let u = dom.sample_at_least(&mut rng, n + 1);
                    let moved = set.mu(set.unit(), &Point::Fin(&x + &u));
                    let inputs = || format!("n={n} x={x} u={u}");
                    match (moved, &image) {
                        (Ok(Point::Fin(y)), Some(img)) => {
                            let d = &y - img;
                            match (d.valuation_at_least(n + 1), coset_of(&cosets, &y, n)) {
                                (Some(true), Some(_)) => CaseOutcome::pass(),
                                (Some(false), _) | (_, None) if y.valuation_bound().is_some() => CaseOutcome::fail(inputs(), y.to_string(), img.to_string()),
                                _ => CaseOutcome::undecided(inputs(), y.to_string(), img.to_string()),
                            }
                        }
                        _ => CaseOutcome::undecided(inputs(), "undetermined", "coset image"),
                    }
                })
                .collect();
            (target, outcomes)
        })
        .collect();

    let report = LemmaReport::from_outcomes(dom.label(), format!("quotient-tau-well-defined(n={n})"), rows.iter().flat_map(|(_, o)| o.clone()));
    let mut images = Vec::with_capacity(q + 1);
    for (target, _) in &rows {
        match target {
            Some(t) => images.push(*t as u32),
            None => return (None, report),
        }
    }
    images.push(zero as u32);
    let Some(tau_bar) = Perm::from_images(images) else { return (None, report) };
    let point = |i: usize, b: Fq| if i == q { q } else { cosets.iter().position(|&d| d == cosets[i] + b).expect("cosets form a group") };
    let u_inf: Vec<Perm> = cosets.iter().map(|&b| Perm::from_images((0..=q).map(|i| point(i, b) as u32).collect()).expect("translation")).collect();
    let set = match PermMoufangSet::from_tau(q, zero, u_inf, &tau_bar) {
        Ok(s) => s,
        Err(_) => return (None, report),
    };
    (Some(LocalQuotient { level: n, cosets, tau_bar, set }), report)
}

/// Well-definedness, the Moufang axioms, an isomorphism with `M(F_|U_n/U_{n+1}|)`
/// and with the quotient at level `n + 2`.
pub fn check_local_quotient(dom: &SeriesDomain, n: i64, seed: u64) -> Vec<LemmaReport> {
    let label = dom.label();
    let (quot, mut reports) = {
        let (q, r) = local_quotient(dom, n, seed);
        (q, vec![r])
    };
    let Some(quot) = quot else {
        reports.push(LemmaReport::single(&label, format!("quotient-moufang(n={n})"), CaseOutcome::fail(format!("n={n}"), "no quotient", "Moufang set")));
        return reports;
    };
    let axioms = quot.set.verify();
    reports.push(LemmaReport::single(
        &label,
        format!("quotient-moufang(n={n})"),
        CaseOutcome::check(axioms.is_ok(), || format!("n={n}"), || axioms.unwrap_err().to_string(), || "Moufang set".into()),
    ));
    let field = Field::of_order(quot.order() as u64).expect("quotient order is a prime power");
    let model = PermMoufangSet::of_field(field);
    let iso = quot.set.find_isomorphism(&model);
    reports.push(LemmaReport::single(
        &label,
        format!("quotient-isomorphic-to-field(n={n})"),
        CaseOutcome::check(iso.is_some(), || format!("n={n} order={}", quot.order()), || "no isomorphism".into(), || format!("M({field})")),
    ));
    let (shifted, _) = local_quotient(dom, n + 2, seed);
    let iso = shifted.as_ref().and_then(|s| quot.set.find_isomorphism(&s.set));
    reports.push(LemmaReport::single(
        &label,
        format!("quotient-shift(n={n}, n+2)"),
        CaseOutcome::check(iso.is_some(), || format!("n={n}"), || "no isomorphism".into(), || format!("quotient at level {}", n + 2)),
    ));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(spec: &str) -> SeriesDomain {
        SeriesDomain::new(spec.parse().unwrap(), 12).unwrap()
    }

    #[test]
    fn f3_quotients_are_m_f3() {
        let d = dom("laurent:q=3");
        for n in [0, 5, -2] {
            for r in check_local_quotient(&d, n, 0) {
                assert!(r.clean(), "{r:?}");
            }
        }
    }

    #[test]
    fn twisted_f4_tau_bar_is_minus_inverse() {
        let d = dom("laurent:q=4,theta=1");
        let (quot, report) = local_quotient(&d, 0, 0);
        assert!(report.clean());
        let quot = quot.unwrap();
        assert_eq!(quot.order(), 4);
        for (i, c) in quot.cosets.iter().enumerate() {
            let expected = match c.inv() {
                Some(x) => quot.cosets.iter().position(|&d| d == -x).unwrap(),
                None => quot.infinity(),
            };
            assert_eq!(quot.tau_bar.image(i), expected);
        }
    }

    #[test]
    fn hermitian_quotients_alternate() {
        let d = dom("hermitian:q=4,theta=1,sigma=theta");
        for n in [0, 1] {
            for r in check_local_quotient(&d, n, 3) {
                assert!(r.clean(), "{r:?}");
            }
        }
        let (q0, _) = local_quotient(&d, 0, 0);
        let (q1, _) = local_quotient(&d, 1, 0);
        assert_eq!((q0.unwrap().order(), q1.unwrap().order()), (2, 4));
    }
}
