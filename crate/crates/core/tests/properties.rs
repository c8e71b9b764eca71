use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use moufang_lab::algebra::{Field, Fq, LaurentPolynomial, SkewLaurent};
use moufang_lab::moufang::quotient::local_quotient;
use moufang_lab::moufang::{MoufangSet, Point, SeriesDomain};
use moufang_lab::mqm::classify::pair_map;
use moufang_lab::mqm::{classify, MQMap};
use moufang_lab::rgdtwin::{birkhoff_reduce, codistance, make_rgd, LMatrix, Sign, TwinVertex};
use moufang_lab::tree::TreeVertex;

const ORDERS: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 16, 27];
/// `(q, twist)` rings for the skew series tests.
const RINGS: [(u64, u32); 5] = [(3, 0), (5, 0), (4, 1), (9, 1), (8, 1)];
const PREC: i64 = 10;

fn field(q: u64) -> Field {
    Field::of_order(q).unwrap()
}

fn elem(f: Field, i: u64) -> Fq {
    f.element(i % f.order() as u64).unwrap()
}

fn nonzero(f: Field, i: u64) -> Fq {
    f.element(1 + i % (f.order() as u64 - 1)).unwrap()
}

fn series(f: Field, twist: u32, start: i64, idx: &[u64]) -> SkewLaurent {
    SkewLaurent::from_coeffs(f, twist, start, idx.iter().map(|&i| elem(f, i)).collect(), Some(PREC))
}

/// Series with a nonzero leading coefficient.
fn unit_series(f: Field, twist: u32, start: i64, lead: u64, idx: &[u64]) -> SkewLaurent {
    let mut c = vec![nonzero(f, lead)];
    c.extend(idx.iter().map(|&i| elem(f, i)));
    SkewLaurent::from_coeffs(f, twist, start, c, Some(PREC))
}

fn poly(f: Field, lo: i64, idx: &[u64]) -> LaurentPolynomial {
    LaurentPolynomial::from_terms(f, idx.iter().enumerate().map(|(i, &c)| (lo + i as i64, elem(f, c))))
}

fn known_zero_to(x: &SkewLaurent, n: i64) -> bool {
    x.is_known_zero() && x.valuation_bound().is_some_and(|v| v >= n) || x.is_exact_zero()
}

fn coeffs() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..1000, 0..8)
}

fn tree_vertex(f: Field, level: i64, idx: &[u64]) -> TreeVertex {
    TreeVertex::new(level, &poly(f, level - idx.len() as i64, idx))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn frobenius_fixes_the_field(qi in 0..ORDERS.len(), i in 0u64..10_000) {
        let f = field(ORDERS[qi]);
        let x = elem(f, i);
        prop_assert_eq!(x.pow(f.order() as i64), x);
        if !x.is_zero() {
            prop_assert!(x.pow(f.order() as i64 - 1).is_one());
            prop_assert_eq!(x * x.inv().unwrap(), f.one());
        }
    }

    #[test]
    fn field_ring_laws(qi in 0..ORDERS.len(), a in 0u64..1000, b in 0u64..1000, c in 0u64..1000) {
        let f = field(ORDERS[qi]);
        let (a, b, c) = (elem(f, a), elem(f, b), elem(f, c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!((a + b).frobenius(1), a.frobenius(1) + b.frobenius(1));
    }

    #[test]
    fn skew_multiplication_is_associative(ri in 0..RINGS.len(), starts in (0i64..3, 0i64..3, 0i64..3), a in coeffs(), b in coeffs(), c in coeffs()) {
        let (q, tw) = RINGS[ri];
        let f = field(q);
        let (a, b, c) = (series(f, tw, starts.0, &a), series(f, tw, starts.1, &b), series(f, tw, starts.2, &c));
        let d = &(&a * &b) * &c - &a * &(&b * &c);
        prop_assert!(known_zero_to(&d, PREC), "{d}");
    }

    #[test]
    fn valuation_is_multiplicative_and_ultrametric(ri in 0..RINGS.len(), va in -3i64..3, vb in -3i64..3, la in 0u64..100, lb in 0u64..100, a in coeffs(), b in coeffs()) {
        let (q, tw) = RINGS[ri];
        let f = field(q);
        let (a, b) = (unit_series(f, tw, va, la, &a), unit_series(f, tw, vb, lb, &b));
        prop_assert_eq!((&a * &b).valuation(), Some(va + vb));
        let s = &a + &b;
        if va != vb {
            prop_assert_eq!(s.valuation(), Some(va.min(vb)));
        } else {
            prop_assert!(s.valuation_bound().unwrap() >= va);
        }
    }

    #[test]
    fn inverse_is_an_involution(ri in 0..RINGS.len(), v in -3i64..3, lead in 0u64..100, a in coeffs()) {
        let (q, tw) = RINGS[ri];
        let f = field(q);
        let a = unit_series(f, tw, v, lead, &a);
        let back = a.inv().unwrap().inv().unwrap();
        let d = &back - &a;
        prop_assert!(d.is_known_zero(), "{a} -> {back}");
        prop_assert!((&a * &a.inv().unwrap() - SkewLaurent::one(f, tw)).is_known_zero());
    }

    #[test]
    fn star_is_an_involution(ri in 2..4usize, start in -4i64..4, a in coeffs(), sigma in any::<bool>()) {
        let (q, tw) = RINGS[ri];
        let f = field(q);
        let a = SkewLaurent::from_coeffs(f, tw, start, a.iter().map(|&i| elem(f, i)).collect(), None);
        prop_assert_eq!(a.star(sigma).unwrap().star(sigma).unwrap(), a);
    }

    #[test]
    fn laurent_polynomials_form_a_ring(qi in 0..ORDERS.len(), lo in (-4i64..4, -4i64..4, -4i64..4), a in coeffs(), b in coeffs(), c in coeffs()) {
        let f = field(ORDERS[qi]);
        let (a, b, c) = (poly(f, lo.0, &a), poly(f, lo.1, &b), poly(f, lo.2, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if let (Some(x), Some(y)) = (a.low_degree(), b.low_degree()) {
            prop_assert_eq!((&a * &b).low_degree(), Some(x + y));
            prop_assert_eq!((&a * &b).high_degree(), Some(a.high_degree().unwrap() + b.high_degree().unwrap()));
        }
        prop_assert_eq!(a.invert_variable().invert_variable(), a);
    }

    #[test]
    fn mu_maps_are_involutions(qi in 0..ORDERS.len(), e in 0u64..1000, a in 0u64..1000, x in 0u64..1000) {
        let f = field(ORDERS[qi]);
        let m = MoufangSet::new(nonzero(f, e)).unwrap();
        let a = nonzero(f, a);
        for p in [Point::Inf, Point::Fin(f.zero()), Point::Fin(elem(f, x))] {
            let back = m.mu(&a, &m.mu(&a, &p).unwrap()).unwrap();
            prop_assert_eq!(back, p);
        }
        let ta = m.tau(&Point::Fin(a)).unwrap();
        let tna = m.tau(&Point::Fin(-a)).unwrap();
        prop_assert_eq!(tna.finite().map(|v| -*v), ta.finite().copied());
    }

    #[test]
    fn hua_maps_are_additive_and_symmetric(qi in 0..ORDERS.len(), e in 0u64..1000, a in 0u64..1000, b in 0u64..1000, x in 0u64..1000, y in 0u64..1000) {
        let f = field(ORDERS[qi]);
        let m = MoufangSet::new(nonzero(f, e)).unwrap();
        let (a, b, x, y) = (nonzero(f, a), elem(f, b), elem(f, x), elem(f, y));
        prop_assert_eq!(m.hua(&a, &(x + y)).unwrap(), m.hua(&a, &x).unwrap() + m.hua(&a, &y).unwrap());
        prop_assert_eq!(m.hua_sym(&a, &b, &x).unwrap(), m.hua_sym(&b, &a, &x).unwrap());
    }

    #[test]
    fn mqm_classification_reconstructs_the_table(p in prop::sample::select(vec![2u32, 3]), rk in 1u32..4, rl in 1u32..4, k in 0u32..6, l in 0u32..6) {
        prop_assume!(p.pow(rk) <= 27 && p.pow(rl) <= 27);
        let (kf, lf) = (Field::new(p, rk).unwrap(), Field::new(p, rl).unwrap());
        let Some(map) = pair_map(kf, lf, k, l) else { return Ok(()) };
        let c = classify(&map).unwrap();
        let rebuilt = pair_map(kf, lf, c.k, c.l).unwrap();
        for a in kf.elements() {
            prop_assert_eq!(rebuilt.field_value(a), map.field_value(a));
        }
    }

    #[test]
    fn mqm_twisting_by_frobenius_stays_classifiable(p in prop::sample::select(vec![2u32, 3]), r in 1u32..4, k in 0u32..4, l in 0u32..4, j in 1i64..3) {
        prop_assume!(p.pow(r) <= 27);
        let f = Field::new(p, r).unwrap();
        let Some(map) = pair_map(f, f, k, l) else { return Ok(()) };
        let twisted = MQMap::from_fn(f, f, |a| map.field_value(a).unwrap().frobenius(j)).unwrap();
        let c = classify(&twisted).unwrap();
        let shifted = pair_map(f, f, (k + j as u32) % r, (l + j as u32) % r).unwrap();
        for a in f.elements() {
            prop_assert_eq!(twisted.field_value(a), shifted.field_value(a));
        }
        let mut got = [c.k % r, c.l % r];
        let mut want = [(k + j as u32) % r, (l + j as u32) % r];
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn birkhoff_factors_multiply_back(qi in 0..4usize, seed in any::<u64>(), len in 1usize..6, c in 0u64..100, k in -2i64..3) {
        let f = field(ORDERS[qi]);
        let sys = make_rgd(f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = &sys.random_element(&mut rng, len, 3) * &LMatrix::torus(nonzero(f, c), k);
        prop_assert!(g.determinant() == LaurentPolynomial::one(f));
        let b = birkhoff_reduce(&g).unwrap();
        prop_assert_eq!(b.product(), g);
        prop_assert!(b.core.is_monomial());
        prop_assert!(b.minus.is_polynomial_in_inverse() && b.plus.is_polynomial());
    }

    #[test]
    fn codistance_is_invariant_and_respects_parity(qi in 0..3usize, seed in any::<u64>(), lu in -3i64..4, lv in -3i64..4, cu in coeffs(), cv in coeffs()) {
        let f = field(ORDERS[qi]);
        let sys = make_rgd(f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = TwinVertex::new(Sign::Plus, tree_vertex(f, lu, &cu[..cu.len().min(4)]));
        let v = TwinVertex::new(Sign::Minus, tree_vertex(f, lv, &cv[..cv.len().min(4)]));
        let d = codistance(&u, &v).unwrap();
        prop_assert_eq!(d as i64 % 2, (u.parity() + v.parity()).rem_euclid(2));
        prop_assert_eq!(codistance(&v, &u).unwrap(), d);
        let g = sys.random_element(&mut rng, 4, 2);
        prop_assert_eq!(codistance(&u.act(&g), &v.act(&g)).unwrap(), d);
    }

    #[test]
    fn generated_elements_are_tree_isometries(qi in 0..3usize, seed in any::<u64>(), lu in -3i64..4, lv in -3i64..4, cu in coeffs(), cv in coeffs()) {
        let f = field(ORDERS[qi]);
        let sys = make_rgd(f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (u, v) = (tree_vertex(f, lu, &cu[..cu.len().min(4)]), tree_vertex(f, lv, &cv[..cv.len().min(4)]));
        let g = sys.random_element(&mut rng, 4, 2).to_mobius();
        let (gu, gv) = (g.act(&u).unwrap(), g.act(&v).unwrap());
        prop_assert_eq!(gu.distance(&gv), u.distance(&v));
        prop_assert_eq!(gu.parity(), u.parity());
    }

    #[test]
    fn reflection_index_law(qi in 0..3usize, sign in any::<bool>(), n in -4i64..5, m in -4i64..5, a in 0u64..100, b in 0u64..100, d in any::<bool>()) {
        let f = field(ORDERS[qi]);
        let sys = make_rgd(f);
        let s = if sign { Sign::Plus } else { Sign::Minus };
        let e = if d { Sign::Plus } else { Sign::Minus };
        let mu = sys.mu_element(s, n, nonzero(f, a));
        let u = sys.root_element(e, m, elem(f, b));
        let c = u.conjugate_by(&mu).unwrap();
        prop_assert!(sys.root_parameter(&c, e.opposite(), 2 * n - m).is_some(), "{c}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn local_quotients_two_levels_apart_are_isomorphic(qi in 0..3usize, n in -2i64..2) {
        let dom = SeriesDomain::new(format!("laurent:q={}", ORDERS[qi]).parse().unwrap(), 12).unwrap();
        let a = local_quotient(&dom, n, 0).0.unwrap();
        let b = local_quotient(&dom, n + 2, 0).0.unwrap();
        prop_assert!(a.set.find_isomorphism(&b.set).is_some());
    }
}
