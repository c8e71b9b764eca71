//! Local Moufang sets: the permutation groups induced on `x^⊥` by the
//! stabilizers `U_{ξ,x}` of the root groups of ends `ξ`.

use std::collections::BTreeSet;

use serde::Serialize;

use super::mobius::Mobius;
use super::vertex::TreeVertex;
use super::{TreeError, TreeModel};
use crate::algebra::{Field, LaurentPolynomial, SkewLaurent};
use crate::moufang::finite::PermMoufangSet;
use crate::moufang::quotient::local_quotient;
use crate::moufang::{Point, SeriesDomain};
use crate::perm::{closure, Perm};
use crate::report::{CaseOutcome, LemmaReport};

/// Neighbors of `base` (up neighbor first) and, for each neighbor `y`, the
/// group induced on them by `U_{ξ,base}` for the ends `ξ` behind `y`.
#[derive(Debug, Clone, Serialize)]
pub struct LocalMoufangData {
    #[serde(serialize_with = "as_text")]
    pub base: TreeVertex,
    #[serde(serialize_with = "all_as_text")]
    pub neighbors: Vec<TreeVertex>,
    #[serde(skip)]
    pub groups: Vec<Vec<Perm>>,
}

fn as_text<S: serde::Serializer>(v: &TreeVertex, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn all_as_text<S: serde::Serializer>(vs: &[TreeVertex], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(vs.iter().map(|v| v.to_string()))
}

impl LocalMoufangData {
    /// `∞ = ` up neighbor, `0 = ` first down neighbor.
    pub fn moufang_set(&self) -> Result<PermMoufangSet, crate::moufang::finite::MoufangViolation> {
        PermMoufangSet::new(0, 1, self.groups.clone())
    }

    pub fn little_projective_group_order(&self, limit: usize) -> Option<usize> {
        let gens: Vec<Perm> = self.groups.iter().flatten().cloned().collect();
        closure(self.neighbors.len(), &gens, limit).map(|g| g.len())
    }
}

/// `g ∈ SL₂` with `g(∞) = ξ`: identity for `∞`, else `α_ξ μ_1`.
fn end_frame(model: &TreeModel, xi: &Point<SkewLaurent>) -> Result<Mobius, TreeError> {
    match xi {
        Point::Inf => Ok(Mobius::identity(model.field())),
        Point::Fin(x) => Ok(model.alpha(x).compose(&model.mu(&SkewLaurent::one(model.field(), 0))?)),
    }
}

/// Permutation of `points` induced by `g`.
fn induced(g: &Mobius, points: &[TreeVertex]) -> Result<Perm, TreeError> {
    let images = points
        .iter()
        .map(|p| {
            let w = g.act(p)?;
            points.iter().position(|x| *x == w).map(|i| i as u32).ok_or_else(|| TreeError::Configuration(format!("{w} is not a neighbor")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Perm::from_images(images).ok_or_else(|| TreeError::Configuration("induced map is not a bijection".into()))
}

/// Conjugates `g α_b g⁻¹` of the generators `α_{d t^m}`, `d ∈ F_q`, of the
/// stabilizer of `x` in `U_ξ`, together with `m`.
pub(crate) fn stabilizer_generators(model: &TreeModel, xi: &Point<SkewLaurent>, x: &TreeVertex, extra_levels: i64) -> Result<Vec<Mobius>, TreeError> {
    let g = end_frame(model, xi)?;
    let gi = g.inverse()?;
    let m = gi.act(x)?.level();
    let mut out = Vec::new();
    for k in 0..=extra_levels {
        for d in model.field().nonzero() {
            out.push(g.compose(&model.alpha(&SkewLaurent::monomial(d, m + k, 0))).compose(&gi));
        }
    }
    Ok(out)
}

/// Group induced on `x^⊥` by `U_{ξ,x}`.
fn induced_group(model: &TreeModel, xi: &Point<SkewLaurent>, x: &TreeVertex, nbrs: &[TreeVertex]) -> Result<Vec<Perm>, TreeError> {
    let mut group: BTreeSet<Perm> = BTreeSet::from([Perm::identity(nbrs.len())]);
    for g in stabilizer_generators(model, xi, x, 0)? {
        group.insert(induced(&g, nbrs)?);
    }
    Ok(group.into_iter().collect())
}

/// Two ends behind the neighbor `idx` of `x` (index 0 is the up neighbor).
fn ends_through(x: &TreeVertex, idx: usize) -> [Point<SkewLaurent>; 2] {
    let f = x.field();
    let n = x.level();
    let c = x.representative();
    let pt = |p: LaurentPolynomial| Point::Fin(p.to_series());
    if idx == 0 {
        [Point::Inf, pt(c + &LaurentPolynomial::monomial(f.one(), n - 1))]
    } else {
        let d = f.elements().nth(idx - 1).expect("down neighbor");
        let base = c + &LaurentPolynomial::monomial(d, n);
        [pt(base.clone()), pt(&base + &LaurentPolynomial::monomial(f.one(), n + 1))]
    }
}

/// Builds the local Moufang data at `x`, checking that both ends behind each
/// neighbor induce the same group of order `q`, fixing that neighbor and
/// regular on the others.
pub fn local_moufang_at(model: &TreeModel, x: &TreeVertex) -> Result<LocalMoufangData, TreeError> {
    let nbrs = x.neighbors();
    let q = model.q();
    let mut groups = Vec::with_capacity(nbrs.len());
    for idx in 0..nbrs.len() {
        let [e1, e2] = ends_through(x, idx);
        let g1 = induced_group(model, &e1, x, &nbrs)?;
        let g2 = induced_group(model, &e2, x, &nbrs)?;
        if g1 != g2 {
            return Err(TreeError::Configuration(format!("ends behind {} induce different groups", nbrs[idx])));
        }
        if g1.len() != q || closure(nbrs.len(), &g1, q).map(|c| c.len()) != Some(q) {
            return Err(TreeError::Configuration(format!("group at {} has {} elements, expected a group of order {q}", nbrs[idx], g1.len())));
        }
        if !g1.iter().all(|p| p.fixes(idx)) {
            return Err(TreeError::Configuration(format!("group at {} moves it", nbrs[idx])));
        }
        for other in (0..nbrs.len()).filter(|&o| o != idx) {
            let orbit: BTreeSet<usize> = g1.iter().map(|p| p.image(other)).collect();
            if orbit.len() != q {
                return Err(TreeError::Configuration(format!("group at {} is not regular on the rest", nbrs[idx])));
            }
        }
        groups.push(g1);
    }
    Ok(LocalMoufangData { base: x.clone(), neighbors: nbrs, groups })
}

/// The local Moufang set at `v` is isomorphic to the quotient `U_n/U_{n+1}`
/// set; for `v = x_n` the map `c t^n ↦ (n+1, c t^n)`, `∞ ↦ x_{n−1}` is
/// checked to be an isomorphism matching `τ̄` with `μ_{t^n}` on `x_n^⊥`.
pub fn check_local_isomorphism(dom: &SeriesDomain, v: &TreeVertex, n: i64, seed: u64) -> LemmaReport {
    let label = dom.spec().to_string();
    let lemma = format!("local-isomorphism(v={v},n={n})");
    let inputs = || format!("v={v} n={n}");
    let model = match TreeModel::for_domain(dom) {
        Ok(m) => m,
        Err(e) => return LemmaReport::single(label, lemma, CaseOutcome::fail(inputs(), e.to_string(), "commutative instance")),
    };
    let (quotient, _) = local_quotient(dom, n, seed);
    let Some(quotient) = quotient else {
        return LemmaReport::single(label, lemma, CaseOutcome::undecided(inputs(), "quotient undetermined", "local quotient"));
    };
    let local = match local_moufang_at(&model, v).and_then(|l| l.moufang_set().map(|s| (l, s)).map_err(|e| TreeError::Configuration(e.to_string()))) {
        Ok(x) => x,
        Err(e) => return LemmaReport::single(label, lemma, CaseOutcome::fail(inputs(), e.to_string(), "local Moufang set")),
    };
    let (data, set) = local;
    let mut rep = LemmaReport::new(label, lemma);
    let found = quotient.set.find_isomorphism(&set);
    rep.record(CaseOutcome::check(found.is_some(), inputs, || "no isomorphism".into(), || "isomorphism".into()));
    if *v == model.x(n) {
        rep.record(explicit_bijection(&model, &quotient.cosets, &quotient.tau_bar, &quotient.set, &data, &set, n));
    }
    rep
}

fn explicit_bijection(
    model: &TreeModel,
    cosets: &[crate::algebra::Fq],
    tau_bar: &Perm,
    qset: &PermMoufangSet,
    data: &LocalMoufangData,
    set: &PermMoufangSet,
    n: i64,
) -> CaseOutcome {
    let inputs = || format!("x_{n}");
    let index = |w: &TreeVertex| data.neighbors.iter().position(|y| y == w);
    let mut images = Vec::with_capacity(cosets.len() + 1);
    for &c in cosets {
        match index(&TreeVertex::new(n + 1, &LaurentPolynomial::monomial(c, n))) {
            Some(i) => images.push(i as u32),
            None => return CaseOutcome::fail(inputs(), format!("coset {c} has no neighbor"), "bijection"),
        }
    }
    images.push(0);
    let Some(phi) = Perm::from_images(images) else {
        return CaseOutcome::fail(inputs(), "coset map is not a bijection", "bijection");
    };
    if !qset.is_isomorphism(set, &phi) {
        return CaseOutcome::fail(inputs(), format!("{phi:?} does not intertwine root groups"), "isomorphism");
    }
    let tau = match model.mu(&SkewLaurent::monomial(model.field().one(), n, 0)).and_then(|m| induced(&m, &data.neighbors)) {
        Ok(t) => t,
        Err(e) => return CaseOutcome::undecided(inputs(), e.to_string(), "μ_{t^n} on x_n^⊥"),
    };
    // φ τ = τ̄ φ as maps on cosets.
    let ok = (0..phi.degree()).all(|i| tau.image(phi.image(i)) == phi.image(tau_bar.image(i)));
    CaseOutcome::check(ok, inputs, || format!("{tau:?}"), || format!("{tau_bar:?} through {phi:?}"))
}

/// Every vertex of the ball of `radius` around `x_0` carries a local Moufang
/// set isomorphic to `M(F_q)`.
pub fn check_local_moufang_ball(model: &TreeModel, radius: u64) -> LemmaReport {
    let ball = super::ball::Ball::new(model.x(0), radius);
    let reference = PermMoufangSet::of_field(model.field());
    let outcomes = ball.vertices.iter().map(|v| match local_moufang_at(model, v).map(|d| d.moufang_set()) {
        Ok(Ok(set)) => {
            let ok = set.verify().is_ok() && set.find_isomorphism(&reference).is_some();
            CaseOutcome::check(ok, || v.to_string(), || "not isomorphic".into(), || format!("M(F_{})", model.q()))
        }
        Ok(Err(e)) => CaseOutcome::fail(v.to_string(), e.to_string(), "Moufang set"),
        Err(e) => CaseOutcome::fail(v.to_string(), e.to_string(), "local data"),
    });
    LemmaReport::from_outcomes(model.label(), format!("local-moufang(radius={radius})"), outcomes.collect::<Vec<_>>())
}

/// For `z` on the ray from `x` to `ξ`, `z ≠ x`, within `depth` steps, every
/// generator of `U_{ξ,x}` (levels `m..m+depth`) fixes `z^⊥` pointwise.
pub fn check_trivial_action_up_the_ray(model: &TreeModel, x: &TreeVertex, xi: &Point<SkewLaurent>, depth: u64) -> LemmaReport {
    let mut rep = LemmaReport::new(model.label(), format!("trivial-up-the-ray(x={x},depth={depth})"));
    let ray = match ray(model.field(), x, xi, depth) {
        Ok(r) => r,
        Err(e) => {
            rep.record(CaseOutcome::undecided(x.to_string(), e.to_string(), "ray"));
            return rep;
        }
    };
    let gens = match stabilizer_generators(model, xi, x, depth as i64) {
        Ok(g) => g,
        Err(e) => {
            rep.record(CaseOutcome::undecided(x.to_string(), e.to_string(), "generators"));
            return rep;
        }
    };
    for z in ray.iter().skip(1) {
        let nbrs = z.neighbors();
        for (k, g) in gens.iter().enumerate() {
            rep.record(match induced(g, &nbrs) {
                Ok(p) => CaseOutcome::check(p.is_identity(), || format!("z={z} generator {k}"), || format!("{p:?}"), || "identity".into()),
                Err(e) => CaseOutcome::undecided(format!("z={z} generator {k}"), e.to_string(), "permutation"),
            });
        }
    }
    rep
}

/// `x = z_0, z_1, ..., z_depth` along the ray from `x` toward `ξ`.
pub fn ray(field: Field, x: &TreeVertex, xi: &Point<SkewLaurent>, depth: u64) -> Result<Vec<TreeVertex>, TreeError> {
    let mut out = vec![x.clone()];
    let mut cur = x.clone();
    for _ in 0..depth {
        cur = match xi {
            Point::Inf => cur.up(),
            Point::Fin(p) => {
                let n = cur.level();
                let head = |m: i64| -> Result<LaurentPolynomial, TreeError> {
                    if p.precision() < crate::algebra::Precision::Absolute(m) {
                        return Err(TreeError::Precision(format!("end {p} below t^{m}")));
                    }
                    Ok(LaurentPolynomial::from_terms(field, p.terms().filter(|&(e, _)| e < m).collect::<Vec<_>>()))
                };
                if TreeVertex::new(n, &head(n)?) == cur {
                    TreeVertex::new(n + 1, &head(n + 1)?)
                } else {
                    cur.up()
                }
            }
        };
        out.push(cur.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(q: u64) -> TreeModel {
        TreeModel::new(Field::of_order(q).unwrap())
    }

    #[test]
    fn q3_local_set_at_x0() {
        let m = model(3);
        let d = local_moufang_at(&m, &m.x(0)).unwrap();
        assert_eq!(d.neighbors.len(), 4);
        assert!(d.groups.iter().all(|g| g.len() == 3));
        assert_eq!(d.little_projective_group_order(1000), Some(12));
        assert!(d.moufang_set().unwrap().verify().is_ok());
    }

    #[test]
    fn q2_is_symmetric_group() {
        let m = model(2);
        let v = TreeVertex::parse(m.field(), "(2; -1:1, 1:1)").unwrap();
        let d = local_moufang_at(&m, &v).unwrap();
        assert_eq!(d.little_projective_group_order(100), Some(6));
        assert!(d.moufang_set().unwrap().find_isomorphism(&PermMoufangSet::of_field(m.field())).is_some());
    }

    #[test]
    fn balls_of_local_sets() {
        for q in [2, 3] {
            let r = check_local_moufang_ball(&model(q), 2);
            assert!(r.clean(), "{r:?}");
        }
    }

    #[test]
    fn isomorphism_with_quotients() {
        for (q, n) in [(3, 0), (2, 1), (3, -2), (4, 2)] {
            let dom = SeriesDomain::new(format!("laurent:q={q}").parse().unwrap(), 10).unwrap();
            let m = TreeModel::for_domain(&dom).unwrap();
            let r = check_local_isomorphism(&dom, &m.x(n), n, 0);
            assert!(r.clean() && r.cases == 2, "{r:?}");
            let shifted = check_local_isomorphism(&dom, &m.x(n + 1), n, 0);
            assert!(shifted.clean() && shifted.cases == 1, "{shifted:?}");
        }
    }

    #[test]
    fn trivial_up_the_ray() {
        let m = model(3);
        let r = check_trivial_action_up_the_ray(&m, &m.x(0), &Point::Inf, 3);
        assert!(r.clean(), "{r:?}");
        let xi = Point::Fin(LaurentPolynomial::from_terms(m.field(), [(-2, m.field().one()), (1, m.field().one())]).to_series());
        let r = check_trivial_action_up_the_ray(
            &model(2),
            &TreeVertex::apartment(Field::of_order(2).unwrap(), 0),
            &Point::Fin(LaurentPolynomial::monomial(Field::of_order(2).unwrap().one(), 2).to_series()),
            3,
        );
        assert!(r.clean(), "{r:?}");
        let r = check_trivial_action_up_the_ray(&m, &m.x(1), &xi, 3);
        assert!(r.clean(), "{r:?}");
    }

    #[test]
    fn level_zero_generator_is_trivial_on_x_minus_1() {
        let m = model(3);
        let g = m.alpha(&SkewLaurent::one(m.field(), 0));
        let nbrs = m.x(-1).neighbors();
        assert!(induced(&g, &nbrs).unwrap().is_identity());
        assert!(!induced(&g, &m.x(0).neighbors()).unwrap().is_identity());
    }

    #[test]
    fn ray_to_a_point_goes_up_then_down() {
        let f = Field::of_order(3).unwrap();
        let xi = Point::Fin(LaurentPolynomial::from_terms(f, [(-1, f.one())]).to_series());
        let r = ray(f, &TreeVertex::apartment(f, 1), &xi, 4).unwrap();
        let s: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        assert_eq!(s, ["(1)", "(0)", "(-1)", "(0; -1:1)", "(1; -1:1)"]);
    }
}
