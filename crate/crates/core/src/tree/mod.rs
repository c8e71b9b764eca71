//! The Bruhat–Tits tree of `SL₂(F_q((t)))` with the root groups acting by
//! Möbius matrices, the apartment `(x_n)`, local Moufang sets at vertices
//! and contraction groups.

mod ball;
mod checks;
mod contraction;
mod local;
mod mobius;
mod vertex;

pub use ball::Ball;
pub use checks::{check_action_isometry, check_filtration, check_reflection, check_tree_degree, reflection_grid, reflection_sweep};
pub use contraction::{check_contraction, contraction_membership, translation_length, Membership};
pub use local::{check_local_isomorphism, check_local_moufang_ball, check_trivial_action_up_the_ray, local_moufang_at, ray, LocalMoufangData};
pub use mobius::{vertex_normalize, Mobius, DEFAULT_WORKING_PRECISION};
pub use vertex::TreeVertex;

use thiserror::Error;

use crate::algebra::{Field, LaurentPolynomial, SkewLaurent};
use crate::moufang::{Carrier, SeriesDomain};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("the tree model needs a commutative coefficient ring (no twist, no involution)")]
    NonCommutative,
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("singular matrix {0}")]
    Singular(String),
    #[error("malformed vertex text: {0}")]
    Parse(String),
    #[error("element is elliptic on the enumerated ball")]
    Elliptic,
    #[error("{0}")]
    Configuration(String),
}

/// The matrix generators over `F_q((t))` at one working precision.
#[derive(Debug, Clone, Copy)]
pub struct TreeModel {
    field: Field,
    rel: i64,
}

impl TreeModel {
    pub fn new(field: Field) -> Self {
        TreeModel { field, rel: DEFAULT_WORKING_PRECISION }
    }

    pub fn for_domain(dom: &SeriesDomain) -> Result<Self, TreeError> {
        if dom.twist() != 0 || dom.is_hermitian() {
            return Err(TreeError::NonCommutative);
        }
        Ok(TreeModel { field: dom.field(), rel: dom.precision().max(DEFAULT_WORKING_PRECISION) })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn label(&self) -> String {
        format!("laurent:q={}", self.field.order())
    }

    pub fn q(&self) -> usize {
        self.field.order() as usize
    }

    pub fn working_precision(&self) -> i64 {
        self.rel
    }

    pub fn x(&self, n: i64) -> TreeVertex {
        TreeVertex::apartment(self.field, n)
    }

    fn series(&self, p: &LaurentPolynomial) -> SkewLaurent {
        p.to_series()
    }

    fn matrix(&self, m: [[SkewLaurent; 2]; 2]) -> Mobius {
        Mobius::new(m, self.rel).expect("commutative entries")
    }

    fn zero(&self) -> SkewLaurent {
        SkewLaurent::zero(self.field, 0)
    }

    fn one(&self) -> SkewLaurent {
        SkewLaurent::one(self.field, 0)
    }

    /// `α_b: x ↦ x + b`.
    pub fn alpha(&self, b: &SkewLaurent) -> Mobius {
        self.matrix([[self.one(), b.clone()], [self.zero(), self.one()]])
    }

    pub fn alpha_poly(&self, b: &LaurentPolynomial) -> Mobius {
        self.alpha(&self.series(b))
    }

    /// The opposite unipotent `x ↦ x/(bx + 1)`, fixing `0`.
    pub fn opposite(&self, b: &SkewLaurent) -> Mobius {
        self.matrix([[self.one(), self.zero()], [b.clone(), self.one()]])
    }

    /// `μ_a = [[0, −a], [a⁻¹, 0]]: x ↦ −a²/x`.
    pub fn mu(&self, a: &SkewLaurent) -> Result<Mobius, TreeError> {
        let ai = a.inv_within(Some(self.rel)).map_err(|_| TreeError::Precision(format!("inverse of {a}")))?;
        Ok(self.matrix([[self.zero(), -a], [ai, self.zero()]]))
    }

    pub fn mu_poly(&self, a: &LaurentPolynomial) -> Result<Mobius, TreeError> {
        self.mu(&self.series(a))
    }

    pub fn diag(&self, a: &SkewLaurent, d: &SkewLaurent) -> Mobius {
        self.matrix([[a.clone(), self.zero()], [self.zero(), d.clone()]])
    }

    /// `diag(t^k, t^{−k})`, translating `x_n ↦ x_{n+2k}`.
    pub fn translation(&self, k: i64) -> Mobius {
        let t = |e: i64| SkewLaurent::monomial(self.field.one(), e, 0);
        self.diag(&t(k), &t(-k))
    }

    /// `h_a = μ_1 μ_a` (first `μ_1`): `x ↦ a²x`.
    pub fn hua(&self, a: &SkewLaurent) -> Result<Mobius, TreeError> {
        Ok(self.mu(&self.one())?.then(&self.mu(a)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moufang::Point;

    #[test]
    fn matrices_match_the_moufang_set_maps() {
        let f5 = Field::of_order(5).unwrap();
        let m = TreeModel::new(f5);
        let a = LaurentPolynomial::from_terms(f5, [(1, f5.from_int(2)), (2, f5.one())]).to_series();
        let x = LaurentPolynomial::from_terms(f5, [(-1, f5.from_int(3)), (0, f5.one())]).to_series();
        let set = crate::moufang::MoufangSet::with_precision(m.one(), Some(40)).unwrap();
        let Point::Fin(want) = set.mu(&a, &Point::Fin(x.clone())).unwrap() else { panic!() };
        let Point::Fin(got) = m.mu(&a).unwrap().act_end(&Point::Fin(x.clone())).unwrap() else { panic!() };
        assert!((&want - &got).valuation_bound().unwrap() > 30);
        let y = set.hua(&a, &x).unwrap();
        let Point::Fin(got) = m.hua(&a).unwrap().act_end(&Point::Fin(x)).unwrap() else { panic!() };
        assert!((&y - &got).valuation_bound().unwrap() > 30);
    }

    #[test]
    fn twisted_domains_are_rejected() {
        let dom = SeriesDomain::new("laurent:q=4,theta=1".parse().unwrap(), 8).unwrap();
        assert_eq!(TreeModel::for_domain(&dom).unwrap_err(), TreeError::NonCommutative);
    }

    #[test]
    fn translation_moves_two_steps() {
        let m = TreeModel::new(Field::of_order(3).unwrap());
        for n in -3..3 {
            assert_eq!(m.translation(1).act(&m.x(n)).unwrap(), m.x(n + 2));
            assert_eq!(m.translation(-1).act(&m.x(n)).unwrap(), m.x(n - 2));
        }
    }
}
