//! Elements of the Hua group that centralize `V + W` for the complements
//! `V = {c}` of `U_1` in `U_0` and `W = {c t}` of `U_2` in `U_1`.

use std::collections::HashSet;

use super::certificate::coefficient_complement;
use super::instance::{case_rng, Domain, SeriesDomain};
use super::set::{Agreement, MoufangSet, Point};
use crate::algebra::SkewLaurent;
use crate::report::{CaseOutcome, LemmaReport};

/// A product `μ_{a_1} μ_{a_2} ⋯` of μ-maps, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuWord(pub Vec<SkewLaurent>);

impl MuWord {
    pub fn apply(&self, set: &MoufangSet<SkewLaurent>, x: &Point<SkewLaurent>) -> Result<Point<SkewLaurent>, super::set::Undetermined> {
        self.0.iter().try_fold(x.clone(), |p, a| set.mu(a, &p))
    }
}

/// Random points of `U` checked besides `V ∪ W`.
pub const SPANNING_PROBES: usize = 6;

/// The Hua generators `μ_1 μ_a` and their inverses `μ_a μ_1` for `a` in
/// `V^# ∪ W^# ∪ {1 + t, t⁻¹}`.
pub fn hua_generators(dom: &SeriesDomain) -> Vec<MuWord> {
    let one = dom.one();
    let mut bases: Vec<SkewLaurent> = coefficient_complement(dom, 0).into_iter().chain(coefficient_complement(dom, 1)).filter(|a| !a.is_exact_zero()).collect();
    bases.push(dom.poly(&[(0, dom.field().one()), (1, dom.field().one())]));
    bases.push(dom.monomial(dom.field().one(), -1));
    let mut gens = Vec::new();
    for a in bases.into_iter().filter(|a| *a != one) {
        gens.push(MuWord(vec![one.clone(), a.clone()]));
        gens.push(MuWord(vec![a, one.clone()]));
    }
    gens
}

/// Enumerates words of at most `max_len` Hua generators, merging words whose
/// actions agree on every probe, and checks that each word fixing `V ∪ W`
/// pointwise fixes all probes.
pub fn check_faithful_action(dom: &SeriesDomain, max_len: usize, seed: u64) -> LemmaReport {
    let set = dom.set();
    let tol = dom.tolerance();
    let fixed: Vec<Point<SkewLaurent>> = coefficient_complement(dom, 0).into_iter().chain(coefficient_complement(dom, 1)).map(Point::Fin).collect();
    let mut rng = case_rng(seed, "faithful", 0);
    let probes: Vec<Point<SkewLaurent>> = (0..SPANNING_PROBES)
        .map(|_| Point::Fin(dom.random_nonzero(&mut rng)))
        .chain([Point::Fin(dom.monomial(dom.field().one(), 3)), Point::Fin(dom.monomial(dom.field().one(), -2))])
        .collect();
    let all: Vec<Point<SkewLaurent>> = fixed.iter().chain(&probes).cloned().collect();
    let gens = hua_generators(dom);
    let mut report = LemmaReport::new(dom.label(), format!("faithful-action(L={max_len})"));

    let signature = |images: &[Point<SkewLaurent>]| images.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("|");
    let mut seen: HashSet<String> = HashSet::from([signature(&all)]);
    // Each frontier entry is a word with its images of `all`.
    let mut frontier: Vec<(Vec<usize>, Vec<Point<SkewLaurent>>)> = vec![(Vec::new(), all.clone())];
    report.record(CaseOutcome::pass());
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, images) in &frontier {
            for (gi, g) in gens.iter().enumerate() {
                let mut w = word.clone();
                w.push(gi);
                let inputs = || format!("word={w:?}");
                let moved: Result<Vec<_>, _> = images.iter().map(|p| g.apply(set, p)).collect();
                let Ok(moved) = moved else {
                    report.record(CaseOutcome::undecided(inputs(), "undetermined", "word action"));
                    continue;
                };
                if !seen.insert(signature(&moved)) {
                    continue;
                }
                let agree = |range: std::ops::Range<usize>| -> Agreement {
                    let mut out = Agreement::Equal;
                    for k in range {
                        match moved[k].agree(&all[k], tol) {
                            Agreement::Different => return Agreement::Different,
                            Agreement::Undecided => out = Agreement::Undecided,
                            Agreement::Equal => {}
                        }
                    }
                    out
                };
                match agree(0..fixed.len()) {
                    Agreement::Different => report.record(CaseOutcome::pass()),
                    Agreement::Undecided => report.record(CaseOutcome::undecided(inputs(), "?", "action on V + W")),
                    Agreement::Equal => match agree(fixed.len()..all.len()) {
                        Agreement::Equal => report.record(CaseOutcome::pass()),
                        Agreement::Undecided => report.record(CaseOutcome::undecided(inputs(), "?", "identity")),
                        Agreement::Different => {
                            let k = (fixed.len()..all.len()).find(|&k| moved[k].agree(&all[k], tol) == Agreement::Different).unwrap();
                            report.record(CaseOutcome::fail(inputs(), moved[k].to_string(), all[k].to_string()));
                        }
                    },
                }
                next.push((w, moved));
            }
        }
        frontier = next;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_words_are_faithful() {
        for (q, n) in [(2, 8), (3, 10)] {
            let dom = SeriesDomain::new(format!("laurent:q={q}").parse().unwrap(), n).unwrap();
            let r = check_faithful_action(&dom, 3, 0);
            assert!(r.clean(), "{r:?}");
            assert!(r.cases > 10);
        }
    }

    #[test]
    fn mu_squared_is_trivial() {
        let dom = SeriesDomain::new("laurent:q=3".parse().unwrap(), 10).unwrap();
        let w = MuWord(vec![dom.one(), dom.one()]);
        let x = Point::Fin(dom.poly(&[(0, dom.field().one()), (2, dom.field().one())]));
        let y = w.apply(dom.set(), &x).unwrap();
        assert_eq!(y.agree(&x, dom.tolerance()), Agreement::Equal);
    }
}
