//! Membership in `con(h) = {g : h^n g h^{−n} → 1}` read off at finite depth.

use serde::Serialize;

use super::ball::Ball;
use super::mobius::Mobius;
use super::{TreeError, TreeModel};
use crate::report::{CaseOutcome, LemmaReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    In,
    Out,
    Undecided,
}

/// Minimal displacement of `h` on `ball`, required to be at least 1 and
/// attained on an axis (`d(v, h²v) = 2 d(v, hv)`).
pub fn translation_length(h: &Mobius, ball: &Ball) -> Result<u64, TreeError> {
    let h2 = h.compose(h);
    let mut best: Option<(u64, bool)> = None;
    for v in &ball.vertices {
        let d = v.distance(&h.act(v)?);
        if best.is_some_and(|(b, _)| d > b) {
            continue;
        }
        let on_axis = d > 0 && v.distance(&h2.act(v)?) == 2 * d;
        best = match best {
            Some((b, axis)) if b == d => Some((b, axis || on_axis)),
            _ => Some((d, on_axis)),
        };
    }
    match best {
        Some((0, _)) | None => Err(TreeError::Elliptic),
        Some((l, true)) => Ok(l),
        Some((_, false)) => Err(TreeError::Configuration("no axis through the ball".into())),
    }
}

fn fixes(g: &Mobius, ball: &Ball) -> Result<bool, TreeError> {
    for v in &ball.vertices {
        if g.act(v)? != *v {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `In` if `h^k g h^{−k}` fixes the ball of radius `depth` around `x_0` for
/// every `k` in the second half of `1..=bound`; `Out` if instead the
/// displacement of `x_0` is positive and nondecreasing there.
pub fn contraction_membership(model: &TreeModel, h: &Mobius, g: &Mobius, depth: u64, bound: u32) -> Result<Membership, TreeError> {
    let ball = Ball::new(model.x(0), depth);
    translation_length(h, &Ball::new(model.x(0), depth.max(2)))?;
    let (hk, hk_inv) = (h.clone(), h.inverse()?);
    let mut conj = g.clone();
    let mut tail = Vec::new();
    for k in 1..=bound {
        conj = hk.compose(&conj).compose(&hk_inv);
        if 2 * k > bound {
            match fixes(&conj, &ball) {
                Ok(fixed) => {
                    let d = model.x(0).distance(&conj.act(&model.x(0))?);
                    tail.push((fixed, d));
                }
                Err(TreeError::Precision(_)) => return Ok(Membership::Undecided),
                Err(e) => return Err(e),
            }
        }
    }
    if tail.iter().all(|&(fixed, _)| fixed) {
        return Ok(Membership::In);
    }
    let grows = tail.windows(2).all(|w| w[0].1 <= w[1].1) && tail.last().is_some_and(|&(fixed, d)| !fixed && d > 0);
    Ok(if grows { Membership::Out } else { Membership::Undecided })
}

/// Every `α_b`, `b = c t^j` with `c ≠ 0` and `|j| ≤ 1`, lies in `con(h)` for
/// `h = diag(t, t⁻¹)`, and its opposite unipotent does not.
pub fn check_contraction(model: &TreeModel, depth: u64, bound: u32) -> LemmaReport {
    let f = model.field();
    let h = model.translation(1);
    let mut rep = LemmaReport::new(model.label(), format!("contraction(depth={depth})"));
    for j in -1..=1 {
        for c in f.nonzero() {
            let b = crate::algebra::LaurentPolynomial::monomial(c, j);
            for (g, want, kind) in [(model.alpha_poly(&b), Membership::In, "alpha"), (model.opposite(&b.to_series()), Membership::Out, "opposite")] {
                let outcome = match contraction_membership(model, &h, &g, depth, bound) {
                    Ok(m) => CaseOutcome::check(m == want, || format!("{kind} b={b}"), || format!("{m:?}"), || format!("{want:?}")),
                    Err(e) => CaseOutcome::fail(format!("{kind} b={b}"), e.to_string(), format!("{want:?}")),
                };
                rep.record(outcome);
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Field, LaurentPolynomial};

    fn setup() -> (TreeModel, LaurentPolynomial) {
        let f = Field::of_order(3).unwrap();
        (TreeModel::new(f), LaurentPolynomial::from_terms(f, [(-2, f.one()), (0, f.from_int(2))]))
    }

    #[test]
    fn root_group_contracts() {
        let (m, b) = setup();
        let h = m.translation(1);
        assert_eq!(contraction_membership(&m, &h, &m.alpha_poly(&b), 3, 8).unwrap(), Membership::In);
        assert_eq!(contraction_membership(&m, &h, &Mobius::identity(m.field()), 3, 8).unwrap(), Membership::In);
        assert_eq!(contraction_membership(&m, &h, &m.opposite(&b.to_series()), 3, 8).unwrap(), Membership::Out);
    }

    #[test]
    fn reversed_translation_swaps_roles() {
        let (m, b) = setup();
        let h = m.translation(-1);
        assert_eq!(contraction_membership(&m, &h, &m.alpha_poly(&b), 3, 8).unwrap(), Membership::Out);
        assert_eq!(contraction_membership(&m, &h, &m.opposite(&b.to_series()), 3, 8).unwrap(), Membership::In);
    }

    #[test]
    fn elliptic_elements_are_rejected() {
        let (m, b) = setup();
        let r = contraction_membership(&m, &m.alpha_poly(&b), &m.alpha_poly(&b), 2, 4);
        assert_eq!(r.unwrap_err(), TreeError::Elliptic);
        let l = translation_length(&m.translation(2), &Ball::new(m.x(0), 2)).unwrap();
        assert_eq!(l, 4);
    }

    #[test]
    fn all_small_generators_classified() {
        let m = TreeModel::new(Field::of_order(2).unwrap());
        let r = check_contraction(&m, 3, 6);
        assert!(r.clean() && r.cases == 6, "{r:?}");
    }
}
