//! Structural checks: degree, stabilizer filtration, reflections, isometry.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::ball::Ball;
use super::mobius::Mobius;
use super::vertex::TreeVertex;
use super::TreeModel;
use crate::algebra::{Field, LaurentPolynomial};
use crate::moufang::{case_rng, Point};
use crate::report::{CaseOutcome, LemmaReport};

/// Random exact polynomial with valuation `v` and `len` coefficients.
pub(crate) fn random_poly(field: Field, rng: &mut ChaCha8Rng, v: i64, len: usize) -> LaurentPolynomial {
    let q = field.order() as u64;
    let lead = field.element(rng.gen_range(1..q)).unwrap();
    let rest = (1..len as i64).map(|i| (v + i, field.element(rng.gen_range(0..q)).unwrap()));
    LaurentPolynomial::from_terms(field, std::iter::once((v, lead)).chain(rest).collect::<Vec<_>>())
}

/// Every vertex of the ball interior has `q + 1` distinct neighbors.
pub fn check_tree_degree(model: &TreeModel, ball: &Ball) -> LemmaReport {
    let q = model.q();
    let outcomes = ball.vertices.iter().filter(|v| v.distance(&ball.center) < ball.radius).map(|v| {
        let mut ns = v.neighbors();
        ns.sort_by_key(|n| n.to_string());
        ns.dedup();
        let ok = ns.len() == q + 1 && ns.iter().all(|n| n.distance(v) == 1 && ball.index_of(n).is_some());
        CaseOutcome::check(ok, || v.to_string(), || format!("{} neighbors", ns.len()), || format!("{}", q + 1))
    });
    LemmaReport::from_outcomes(model.label(), "tree-degree", outcomes.collect::<Vec<_>>())
}

/// `α_b` fixes `x_n` iff `v(b) ≥ n`, for `|n| ≤ 6`.
pub fn check_filtration(model: &TreeModel, seed: u64, samples: usize) -> LemmaReport {
    let mut rep = LemmaReport::new(model.label(), "stabilizer-filtration");
    let mut rng = case_rng(seed, "filtration", 0);
    for _ in 0..samples {
        let n = rng.gen_range(-6..=6);
        let vb = rng.gen_range(n - 3..=n + 3);
        let b = random_poly(model.field(), &mut rng, vb, 5);
        let outcome = match model.alpha_poly(&b).act(&model.x(n)) {
            Ok(img) => CaseOutcome::check((img == model.x(n)) == (vb >= n), || format!("n={n} b={b}"), || img.to_string(), || format!("fixed iff {vb} >= {n}")),
            Err(e) => CaseOutcome::undecided(format!("n={n} b={b}"), e.to_string(), "vertex"),
        };
        rep.record(outcome);
    }
    rep
}

/// `μ_a` maps `x_m` to `x_{2n−m}` for `n = v(a)`, and `x ∈ U_m \ U_{m+1}` to
/// valuation `2n − m`.
pub fn check_reflection(model: &TreeModel, a: &LaurentPolynomial, m: i64, seed: u64) -> LemmaReport {
    let n = a.low_degree().expect("a ≠ 0");
    let mut rep = LemmaReport::new(model.label(), format!("reflection(n={n},m={m})"));
    reflection_cases(model, a, m, seed, &mut rep);
    rep
}

fn reflection_cases(model: &TreeModel, a: &LaurentPolynomial, m: i64, seed: u64, rep: &mut LemmaReport) {
    let n = a.low_degree().expect("a ≠ 0");
    let inputs = || format!("a={a} m={m}");
    let mu = match model.mu_poly(a) {
        Ok(mu) => mu,
        Err(e) => return rep.record(CaseOutcome::undecided(inputs(), e.to_string(), "μ_a")),
    };
    rep.record(match mu.act(&model.x(m)) {
        Ok(img) => CaseOutcome::check(img == model.x(2 * n - m), inputs, || img.to_string(), || model.x(2 * n - m).to_string()),
        Err(e) => CaseOutcome::undecided(inputs(), e.to_string(), "vertex"),
    });
    let mut rng = case_rng(seed, "reflection", (n * 64 + m) as u64);
    for _ in 0..3 {
        let x = random_poly(model.field(), &mut rng, m, 6);
        let outcome = match mu.act_end(&Point::Fin(x.to_series())) {
            Ok(Point::Fin(y)) => CaseOutcome::check(
                y.valuation() == Some(2 * n - m),
                || format!("a={a} x={x}"),
                || format!("v={:?}", y.valuation()),
                || format!("v={}", 2 * n - m),
            ),
            Ok(Point::Inf) => CaseOutcome::fail(format!("a={a} x={x}"), "∞", format!("v={}", 2 * n - m)),
            Err(e) => CaseOutcome::undecided(format!("a={a} x={x}"), e.to_string(), "end"),
        };
        rep.record(outcome);
    }
}

/// [`check_reflection`] over random `a` with `|v(a)|, |m| ≤ 4`.
pub fn reflection_sweep(model: &TreeModel, seed: u64, samples: usize) -> LemmaReport {
    let mut rep = LemmaReport::new(model.label(), "reflection");
    let mut rng = case_rng(seed, "reflection-sweep", 0);
    for _ in 0..samples {
        let (n, m) = (rng.gen_range(-4..=4), rng.gen_range(-4..=4));
        let a = random_poly(model.field(), &mut rng, n, 4);
        reflection_cases(model, &a, m, seed, &mut rep);
    }
    rep
}

/// [`check_reflection`] at every `(v(a), m)` with `|v(a)|, |m| ≤ bound`, one random `a` each.
pub fn reflection_grid(model: &TreeModel, seed: u64, bound: i64) -> LemmaReport {
    let mut rep = LemmaReport::new(model.label(), "reflection");
    let mut rng = case_rng(seed, "reflection-grid", 0);
    for n in -bound..=bound {
        for m in -bound..=bound {
            let a = random_poly(model.field(), &mut rng, n, 4);
            reflection_cases(model, &a, m, seed, &mut rep);
        }
    }
    rep
}

/// Each generator preserves adjacency, distances of sampled pairs and level
/// parity on the ball.
pub fn check_action_isometry(model: &TreeModel, ball: &Ball, gens: &[(String, Mobius)], seed: u64, pairs: usize) -> LemmaReport {
    let mut rep = LemmaReport::new(model.label(), "action-isometry");
    let mut rng = case_rng(seed, "isometry", ball.len() as u64);
    for (name, g) in gens {
        let images: Result<Vec<TreeVertex>, _> = ball.vertices.iter().map(|v| g.act(v)).collect();
        let images = match images {
            Ok(i) => i,
            Err(e) => {
                rep.record(CaseOutcome::undecided(name.clone(), e.to_string(), "images"));
                continue;
            }
        };
        let bad_edge = ball.edges.iter().find(|&&(i, j)| images[i].distance(&images[j]) != 1);
        rep.record(CaseOutcome::check(bad_edge.is_none(), || format!("{name} edges"), || format!("{bad_edge:?}"), || "adjacent".into()));
        let parity = |v: &TreeVertex, w: &TreeVertex| (v.parity() == w.parity()) == (ball.vertices[0].parity() == images[0].parity());
        let flips = ball.vertices.iter().zip(&images).all(|(v, w)| parity(v, w));
        rep.record(CaseOutcome::check(flips, || format!("{name} parity"), || "mixed".into(), || "uniform".into()));
        for _ in 0..pairs {
            let (i, j) = (rng.gen_range(0..ball.len()), rng.gen_range(0..ball.len()));
            let (d0, d1) = (ball.vertices[i].distance(&ball.vertices[j]), images[i].distance(&images[j]));
            rep.record(CaseOutcome::check(d0 == d1, || format!("{name} {} {}", ball.vertices[i], ball.vertices[j]), || d1.to_string(), || d0.to_string()));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(q: u64) -> TreeModel {
        TreeModel::new(Field::of_order(q).unwrap())
    }

    #[test]
    fn q2_reflection_through_x0() {
        let m = model(2);
        let one = LaurentPolynomial::one(m.field());
        assert_eq!(m.mu_poly(&one).unwrap().act(&m.x(3)).unwrap(), m.x(-3));
        let t = LaurentPolynomial::monomial(m.field().one(), 1);
        assert_eq!(m.mu_poly(&t).unwrap().act(&m.x(0)).unwrap(), m.x(2));
        assert_eq!(m.mu_poly(&t).unwrap().act(&m.x(1)).unwrap(), m.x(1));
        assert!(check_reflection(&m, &one, 3, 0).clean());
    }

    #[test]
    fn sweeps_are_clean() {
        for q in [2, 3, 4, 5] {
            let m = model(q);
            assert!(check_filtration(&m, 1, 60).clean());
            let r = reflection_sweep(&m, 2, 30);
            assert!(r.clean(), "{r:?}");
            assert!(check_tree_degree(&m, &Ball::new(m.x(0), 3)).clean());
        }
    }

    #[test]
    fn generators_are_isometries() {
        let m = model(3);
        let f = m.field();
        let p = |t: &[(i64, i64)]| LaurentPolynomial::from_terms(f, t.iter().map(|&(e, c)| (e, f.from_int(c))).collect::<Vec<_>>());
        let gens = vec![
            ("alpha".to_string(), m.alpha_poly(&p(&[(-1, 1), (2, 2)]))),
            ("mu".to_string(), m.mu_poly(&p(&[(1, 1), (2, 1)])).unwrap()),
            ("opposite".to_string(), m.opposite(&p(&[(0, 2)]).to_series())),
            ("translation".to_string(), m.translation(1)),
        ];
        let r = check_action_isometry(&m, &Ball::new(m.x(0), 3), &gens, 0, 40);
        assert!(r.clean(), "{r:?}");
    }
}
