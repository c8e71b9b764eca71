//! The twin tree of `SL₂(F_q[t, t⁻¹])`: the tree over `F_q((t))` and the tree
//! over `F_q((t⁻¹))`, with codistance read off from Birkhoff cores.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::birkhoff::{birkhoff_reduce, BirkhoffError};
use super::matrix::LMatrix;
use super::rgd::{RGDSystem, Sign};
use crate::algebra::{Field, LaurentPolynomial};
use crate::moufang::case_rng;
use crate::report::{CaseOutcome, LemmaReport};
use crate::tree::{Ball, TreeVertex};

/// A vertex of `T_+` (in the variable `t`) or of `T_−` (stored in `s = t⁻¹`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwinVertex {
    pub sign: Sign,
    pub vertex: TreeVertex,
}

fn basis_of(v: &TreeVertex) -> LMatrix {
    let f = v.field();
    LMatrix::new([[LaurentPolynomial::monomial(f.one(), v.level()), v.representative().clone()], [LaurentPolynomial::zero(f), LaurentPolynomial::one(f)]])
}

/// `b / d` expanded up to (excluding) `t^bound`.
fn quotient_below(b: &LaurentPolynomial, d: &LaurentPolynomial, bound: i64) -> LaurentPolynomial {
    let f = d.field();
    let vd = d.low_degree().expect("nonzero pivot");
    let di = d.coeff(vd).inv().unwrap();
    let mut r = b.clone();
    let mut out = Vec::new();
    while let Some(lo) = r.low_degree() {
        let j = lo - vd;
        if j >= bound {
            break;
        }
        let c = r.coeff(lo) * di;
        out.push((j, c));
        r = &r - &(d * &LaurentPolynomial::monomial(c, j));
    }
    LaurentPolynomial::from_terms(f, out)
}

fn valuation(p: &LaurentPolynomial) -> Option<i64> {
    p.low_degree()
}

/// The vertex spanned by the columns of `m`, exactly.
fn lattice_vertex(m: &LMatrix) -> TreeVertex {
    let e = m.entries();
    let (c, d) = (&e[1][0], &e[1][1]);
    let swap = match (valuation(c), valuation(d)) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        _ => false,
    };
    let (b, d) = if swap { (&e[0][0], c) } else { (&e[0][1], d) };
    let n = valuation(&m.determinant()).expect("invertible") - 2 * valuation(d).unwrap();
    TreeVertex::new(n, &quotient_below(b, d, n))
}

impl TwinVertex {
    pub fn new(sign: Sign, vertex: TreeVertex) -> Self {
        TwinVertex { sign, vertex }
    }

    /// `x_n^+ = (n)` and `x_n^- = (−n)` in the variable `t⁻¹`.
    pub fn apartment(field: Field, sign: Sign, n: i64) -> Self {
        let level = if sign == Sign::Plus { n } else { -n };
        TwinVertex { sign, vertex: TreeVertex::apartment(field, level) }
    }

    pub fn apartment_index(&self) -> Option<i64> {
        self.vertex.on_apartment().then(|| if self.sign == Sign::Plus { self.vertex.level() } else { -self.vertex.level() })
    }

    /// A basis over `F_q[t, t⁻¹]` in the variable `t`.
    pub fn basis(&self) -> LMatrix {
        let b = basis_of(&self.vertex);
        match self.sign {
            Sign::Plus => b,
            Sign::Minus => b.invert_variable(),
        }
    }

    pub fn parity(&self) -> i64 {
        self.vertex.parity()
    }

    pub fn neighbors(&self) -> Vec<TwinVertex> {
        self.vertex.neighbors().into_iter().map(|v| TwinVertex::new(self.sign, v)).collect()
    }

    pub fn act(&self, g: &LMatrix) -> TwinVertex {
        let v = match self.sign {
            Sign::Plus => lattice_vertex(&(g * &basis_of(&self.vertex))),
            Sign::Minus => lattice_vertex(&(&g.invert_variable() * &basis_of(&self.vertex))),
        };
        TwinVertex::new(self.sign, v)
    }
}

impl fmt::Display for TwinVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.sign, self.vertex)
    }
}

/// `δ*(u, v)` for vertices of opposite signs: the spread of the Birkhoff core of `B_v⁻¹ B_u`.
pub fn codistance(u: &TwinVertex, v: &TwinVertex) -> Result<u64, BirkhoffError> {
    let (p, m) = match (u.sign, v.sign) {
        (Sign::Plus, Sign::Minus) => (u, v),
        (Sign::Minus, Sign::Plus) => (v, u),
        _ => panic!("codistance needs vertices of opposite signs"),
    };
    let g = &m.basis().inverse().expect("basis") * &p.basis();
    Ok(birkhoff_reduce(&g)?.spread())
}

fn cod(u: &TwinVertex, v: &TwinVertex) -> u64 {
    codistance(u, v).expect("bases are invertible")
}

/// Both codistance axioms at the pair `(u, v)`, moving `u`.
fn axioms_at(u: &TwinVertex, v: &TwinVertex) -> CaseOutcome {
    let d = cod(u, v);
    let ds: Vec<u64> = u.neighbors().iter().map(|w| cod(w, v)).collect();
    let steps = ds.iter().all(|&e| e + 1 == d || e == d + 1);
    let up = ds.iter().filter(|&&e| e == d + 1).count();
    let ok = steps && (d == 0 || up == 1);
    CaseOutcome::check(ok, || format!("u={u}, v={v}"), || format!("d={d}, neighbors {ds:?}"), || "±1 steps, one increase".into())
}

#[derive(Debug, Clone, Serialize)]
pub struct TwinSummary {
    pub q: u32,
    pub radius: u64,
    pub plus_vertices: usize,
    pub minus_vertices: usize,
}

fn ball(field: Field, sign: Sign, radius: u64) -> Vec<TwinVertex> {
    Ball::new(TwinVertex::apartment(field, sign, 0).vertex, radius).vertices.into_iter().map(|v| TwinVertex::new(sign, v)).collect()
}

/// Codistance axioms on all pairs in the radius-`radius` balls around `x_0^±`,
/// the apartment formula `|n − m|`, parity and invariance under sampled elements.
pub fn check_twin_axioms(sys: &RGDSystem, radius: u64, seed: u64, samples: usize) -> Vec<LemmaReport> {
    let field = sys.field();
    let label = format!("twin:q={}", field.order());
    let plus = ball(field, Sign::Plus, radius);
    let minus = ball(field, Sign::Minus, radius);

    let pairs: Vec<(usize, usize)> = (0..plus.len()).flat_map(|i| (0..minus.len()).map(move |j| (i, j))).collect();
    let per_pair: Vec<(CaseOutcome, CaseOutcome, CaseOutcome)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (u, v) = (&plus[i], &minus[j]);
            let d = cod(u, v) as i64;
            let parity = CaseOutcome::check(
                (d - u.parity() - v.parity()).rem_euclid(2) == 0,
                || format!("u={u}, v={v}"),
                || d.to_string(),
                || "parity of levels".into(),
            );
            (axioms_at(u, v), axioms_at(v, u), parity)
        })
        .collect();
    let mut axioms = LemmaReport::new(&label, "twin-axioms");
    let mut parity = LemmaReport::new(&label, "codistance-parity");
    for (a, b, p) in per_pair {
        axioms.record(a);
        axioms.record(b);
        parity.record(p);
    }

    let r = radius as i64;
    let mut apartment = LemmaReport::new(&label, "twin-apartment");
    let mut opposite = LemmaReport::new(&label, "twin-opposite");
    for n in -r..=r {
        let u = TwinVertex::apartment(field, Sign::Plus, n);
        let mut zeros = Vec::new();
        for m in -r..=r {
            let v = TwinVertex::apartment(field, Sign::Minus, m);
            let d = cod(&u, &v);
            let want = (n - m).unsigned_abs();
            apartment.record(CaseOutcome::check(d == want, || format!("n={n}, m={m}"), || d.to_string(), || want.to_string()));
            if d == 0 {
                zeros.push(m);
            }
        }
        opposite.record(CaseOutcome::check(zeros == [n], || format!("n={n}"), || format!("{zeros:?}"), || format!("[{n}]")));
    }

    let mut invariance = LemmaReport::new(&label, "codistance-invariance");
    for i in 0..samples {
        let mut rng = case_rng(seed, "twin-invariance", i as u64);
        let g = sys.random_element(&mut rng, 6, 2);
        let u = &plus[rand::Rng::gen_range(&mut rng, 0..plus.len())];
        let v = &minus[rand::Rng::gen_range(&mut rng, 0..minus.len())];
        let (gu, gv) = (u.act(&g), v.act(&g));
        let (d, e) = (cod(u, v), cod(&gu, &gv));
        invariance.record(CaseOutcome::check(d == e, || format!("g={g}, u={u}, v={v}"), || e.to_string(), || d.to_string()));
    }
    vec![axioms, apartment, opposite, parity, invariance]
}

/// The twin root `α_k = ({x_n^+ : n ≤ k}, {x_m^- : m ≥ k})` and its root group
/// `{[[1, a t^k], [0, 1]]}` acting on the `q` twin apartments through `α_k` and a
/// neighbor of `x_k^+` outside it, compared along `depth` further vertices.
pub fn check_root_group_fullness(sys: &RGDSystem, k: i64, depth: u64) -> LemmaReport {
    let field = sys.field();
    let mut rep = LemmaReport::new(format!("twin:q={}", field.order()), format!("root-group-fullness(k={k})"));
    let dd = depth as i64;
    let x = |s: Sign, n: i64| TwinVertex::apartment(field, s, n);
    let t_k = |a| LMatrix::upper(LaurentPolynomial::monomial(a, k));
    let group: Vec<LMatrix> = field.elements().map(t_k).collect();

    // A twin root: codistance vanishes only at the two extremal vertices.
    for n in k - dd..=k {
        for m in k..=k + dd {
            let d = cod(&x(Sign::Plus, n), &x(Sign::Minus, m));
            let ok = (d == 0) == (n == k && m == k);
            rep.record(CaseOutcome::check(ok, || format!("x+{n}, x-{m}"), || d.to_string(), || "zero only at the extremal pair".into()));
        }
    }

    // U_α fixes everything adjacent to the interior.
    let mut interior: Vec<TwinVertex> = (k - dd..k).map(|n| x(Sign::Plus, n)).chain((k + 1..=k + dd).map(|m| x(Sign::Minus, m))).collect();
    let around: Vec<TwinVertex> = interior.iter().flat_map(|v| v.neighbors()).collect();
    interior.extend(around);
    for u in &group {
        let moved: Vec<&TwinVertex> = interior.iter().filter(|v| v.act(u) != **v).collect();
        rep.record(CaseOutcome::check(
            moved.is_empty(),
            || u.to_string(),
            || format!("moves {}", moved.len()),
            || "fixes the interior and its neighbors".into(),
        ));
    }

    // The candidate extensions g_c Σ through w_c = (k+1; c t^k), truncated at depth.
    let extension = |c| -> Vec<TwinVertex> {
        let g = t_k(c);
        (k - dd..=k + 1 + dd).map(|n| x(Sign::Plus, n).act(&g)).chain((k - 1 - dd..=k + dd).map(|m| x(Sign::Minus, m).act(&g))).collect()
    };
    let extensions: Vec<Vec<TwinVertex>> = field.elements().map(extension).collect();
    for (c, ext) in field.elements().zip(&extensions) {
        let w = TwinVertex::new(Sign::Plus, TreeVertex::new(k + 1, &LaurentPolynomial::monomial(c, k)));
        let through = ext.contains(&w) && ext.contains(&x(Sign::Plus, k)) && ext.contains(&x(Sign::Minus, k));
        let span = (k - dd..=k + 1 + dd).collect::<Vec<_>>();
        let twin = span.iter().all(|&n| {
            span.iter().filter(|&&m| m <= k + dd && m >= k - 1 - dd).all(|&m| {
                let g = t_k(c);
                cod(&x(Sign::Plus, n).act(&g), &x(Sign::Minus, m).act(&g)) == (n - m).unsigned_abs()
            })
        });
        rep.record(CaseOutcome::check(
            through && twin,
            || format!("w=+{}", w.vertex),
            || format!("through={through}, twin={twin}"),
            || "twin apartment containing α and w".into(),
        ));
    }

    // Regular action on the extensions.
    for (i, ext) in extensions.iter().enumerate() {
        let mut images: Vec<usize> = group
            .iter()
            .filter_map(|u| {
                let img: Vec<TwinVertex> = ext.iter().map(|v| v.act(u)).collect();
                extensions.iter().position(|e| *e == img)
            })
            .collect();
        let found = images.len();
        images.sort_unstable();
        images.dedup();
        let ok = found == group.len() && images.len() == group.len();
        rep.record(CaseOutcome::check(ok, || format!("extension {i}"), || format!("orbit {}", images.len()), || format!("orbit {} and free", group.len())));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rgdtwin::make_rgd;

    fn f(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn apartment_codistances() {
        let f = f(3);
        let x = |s, n| TwinVertex::apartment(f, s, n);
        assert_eq!(cod(&x(Sign::Plus, 0), &x(Sign::Minus, 0)), 0);
        assert_eq!(cod(&x(Sign::Plus, 2), &x(Sign::Minus, 0)), 2);
        assert_eq!(cod(&x(Sign::Minus, -1), &x(Sign::Plus, 3)), 4);
        // From x_3^+ against x_0^-, only x_4^+ moves away.
        let v = x(Sign::Minus, 0);
        let up: Vec<TwinVertex> = x(Sign::Plus, 3).neighbors().into_iter().filter(|w| cod(w, &v) == 4).collect();
        assert_eq!(up, vec![x(Sign::Plus, 4)]);
        // δ* = 0: every neighbor is at 1.
        assert!(x(Sign::Plus, 0).neighbors().iter().all(|w| cod(w, &v) == 1));
    }

    #[test]
    fn translate_by_negative_valuation_unipotent_stays_opposite() {
        let f = f(3);
        let b = LaurentPolynomial::from_terms(f, [(-2, f.one()), (-1, f.from_int(2))]);
        let g = LMatrix::upper(b);
        let u = TwinVertex::apartment(f, Sign::Plus, 0).act(&g);
        let v = TwinVertex::apartment(f, Sign::Minus, 0);
        assert_ne!(u, TwinVertex::apartment(f, Sign::Plus, 0));
        assert_eq!(v.act(&g), v);
        assert_eq!(cod(&u, &v), 0);
    }

    #[test]
    fn exact_action_matches_the_series_model() {
        let f = f(2);
        let sys = make_rgd(f);
        let mut rng = case_rng(5, "act", 0);
        for _ in 0..10 {
            let g = sys.random_element(&mut rng, 5, 2);
            let v = TwinVertex::apartment(f, Sign::Plus, 1);
            let want = g.to_mobius().act(&v.vertex).unwrap();
            assert_eq!(v.act(&g).vertex, want);
        }
    }

    #[test]
    fn small_twin_check() {
        let sys = make_rgd(f(2));
        for r in check_twin_axioms(&sys, 2, 0, 10) {
            assert!(r.clean(), "{r:?}");
        }
        assert!(check_root_group_fullness(&sys, 0, 2).clean());
    }
}
