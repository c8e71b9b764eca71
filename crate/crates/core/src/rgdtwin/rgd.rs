//! The root group datum of `SL₂(F_q[t, t⁻¹])` with its torus and the
//! checks of the axioms RGD0–RGD4 on a finite index window.

use rand::Rng;
use serde::Serialize;

use super::matrix::LMatrix;
use crate::algebra::{Field, Fq, LaurentPolynomial};
use crate::moufang::case_rng;
use crate::report::{CaseOutcome, LemmaReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// `U_n^+ = {[[1, 0], [a tⁿ, 1]]}`, `U_n^- = {[[1, a t⁻ⁿ], [0, 1]]}`, `H = {diag(a, a⁻¹)}`.
#[derive(Debug, Clone, Copy)]
pub struct RGDSystem {
    field: Field,
}

impl RGDSystem {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn label(&self) -> String {
        format!("rgd:q={}", self.field.order())
    }

    pub fn root_element(&self, sign: Sign, n: i64, a: Fq) -> LMatrix {
        match sign {
            Sign::Plus => LMatrix::lower(LaurentPolynomial::monomial(a, n)),
            Sign::Minus => LMatrix::upper(LaurentPolynomial::monomial(a, -n)),
        }
    }

    pub fn root_group(&self, sign: Sign, n: i64) -> Vec<LMatrix> {
        self.field.elements().map(|a| self.root_element(sign, n, a)).collect()
    }

    /// The parameter `a` if `g ∈ U_n^ε` (up to the center).
    pub fn root_parameter(&self, g: &LMatrix, sign: Sign, n: i64) -> Option<Fq> {
        let param = |g: &LMatrix| {
            let (tri, x) = match sign {
                Sign::Plus => (g.is_lower_unitriangular(), g.entry(1, 0)),
                Sign::Minus => (g.is_upper_unitriangular(), g.entry(0, 1)),
            };
            let e = if sign == Sign::Plus { n } else { -n };
            if !tri {
                return None;
            }
            if x.is_zero() {
                return Some(self.field.zero());
            }
            x.as_monomial().filter(|&(_, k)| k == e).map(|(c, _)| c)
        };
        param(g).or_else(|| param(&-g))
    }

    /// Membership in the group generated by all `U_m^ε`: unitriangular of the matching shape.
    pub fn in_unipotent(&self, g: &LMatrix, sign: Sign) -> bool {
        let shape = |g: &LMatrix| match sign {
            Sign::Plus => g.is_lower_unitriangular(),
            Sign::Minus => g.is_upper_unitriangular(),
        };
        shape(g) || shape(&-g)
    }

    pub fn torus(&self) -> Vec<LMatrix> {
        self.field.nonzero().map(|a| LMatrix::torus(a, 0)).collect()
    }

    /// `μ_a = u · a · u'` with `u, u' ∈ U_n^{−ε}` the unique pair making it monomial.
    pub fn mu_element(&self, sign: Sign, n: i64, a: Fq) -> LMatrix {
        let ai = -a.inv().expect("nonzero root element");
        let u = self.root_element(sign.opposite(), n, ai);
        &(&u * &self.root_element(sign, n, a)) * &u
    }

    pub fn s0(&self) -> LMatrix {
        self.mu_element(Sign::Plus, 0, self.field.one())
    }

    pub fn s1(&self) -> LMatrix {
        self.mu_element(Sign::Plus, 1, self.field.one())
    }

    /// `t̂ = s₀ s₁ = diag(−t, −t⁻¹)`.
    pub fn t_hat(&self) -> LMatrix {
        &self.s0() * &self.s1()
    }

    pub fn t_hat_power(&self, k: i64) -> LMatrix {
        let c = if k % 2 == 0 { self.field.one() } else { -self.field.one() };
        LMatrix::torus(c, k)
    }
}

pub fn make_rgd(field: Field) -> RGDSystem {
    RGDSystem { field }
}

fn spread(p: &LaurentPolynomial) -> i64 {
    p.high_degree().unwrap_or(0) - p.low_degree().unwrap_or(0)
}

/// `a = q c + r` with `r = 0` or `spread(r) < spread(c)`.
fn div_rem(a: &LaurentPolynomial, c: &LaurentPolynomial) -> (LaurentPolynomial, LaurentPolynomial) {
    let f = c.field();
    let (hc, lead) = (c.high_degree().expect("nonzero divisor"), c.coeff(c.high_degree().unwrap()));
    let li = lead.inv().unwrap();
    let (mut q, mut r) = (LaurentPolynomial::zero(f), a.clone());
    while !r.is_zero() && spread(&r) >= spread(c) {
        let hr = r.high_degree().unwrap();
        let m = LaurentPolynomial::monomial(r.coeff(hr) * li, hr - hc);
        r = &r - &(&m * c);
        q = &q + &m;
    }
    (q, r)
}

/// A word in `H ∪ ⋃ U_n^ε` representing `g` up to the center.
#[derive(Debug, Clone)]
pub struct GeneratorWord {
    pub letters: Vec<(String, LMatrix)>,
}

impl GeneratorWord {
    pub fn product(&self, field: Field) -> LMatrix {
        self.letters.iter().fold(LMatrix::identity(field), |acc, (_, g)| &acc * g)
    }
}

impl RGDSystem {
    /// Split `upper(p)` or `lower(p)` into root group elements, one per monomial of `p`.
    fn push_elementary(&self, word: &mut Vec<(String, LMatrix)>, lower: bool, p: &LaurentPolynomial) {
        for (e, c) in p.terms() {
            let (sign, n) = if lower { (Sign::Plus, e) } else { (Sign::Minus, -e) };
            word.push((format!("U{sign}{n}({c})"), self.root_element(sign, n, c)));
        }
    }

    fn push_mu(&self, word: &mut Vec<(String, LMatrix)>, sign: Sign, n: i64, inverse: bool) {
        let one = self.field.one();
        let a = if inverse { -one } else { one };
        let u = self.root_element(sign.opposite(), n, -a.inv().unwrap());
        let tag = |g: &LMatrix, s: Sign, m: i64, c: Fq| (format!("U{s}{m}({c})"), g.clone());
        word.push(tag(&u, sign.opposite(), n, -a.inv().unwrap()));
        word.push(tag(&self.root_element(sign, n, a), sign, n, a));
        word.push(tag(&u, sign.opposite(), n, -a.inv().unwrap()));
    }

    /// Euclidean reduction of the first column, then `H`, a power of `t̂` spelled
    /// through `s₀ s₁` and a final root group word.
    pub fn factor(&self, g: &LMatrix) -> Option<GeneratorWord> {
        let f = self.field;
        g.determinant().as_monomial().filter(|&(c, k)| c.is_one() && k == 0)?;
        let mut a = g.clone();
        let mut ops: Vec<(bool, LaurentPolynomial)> = Vec::new();
        let left = |a: &LMatrix, lower: bool, p: &LaurentPolynomial| if lower { &LMatrix::lower(p.clone()) * a } else { &LMatrix::upper(p.clone()) * a };
        while !a.entry(1, 0).is_zero() {
            if a.entry(0, 0).is_zero() {
                let p = LaurentPolynomial::one(f);
                a = left(&a, false, &p);
                ops.push((false, p));
                continue;
            }
            let (q, _) = div_rem(a.entry(1, 0), a.entry(0, 0));
            if !q.is_zero() {
                a = left(&a, true, &-&q);
                ops.push((true, -&q));
            }
            if a.entry(1, 0).is_zero() {
                break;
            }
            let (q, _) = div_rem(a.entry(0, 0), a.entry(1, 0));
            a = left(&a, false, &-&q);
            ops.push((false, -&q));
        }
        // Now `a = diag(c t^k, c⁻¹ t^{−k}) · upper(x)`.
        let (c, k) = a.entry(0, 0).as_monomial()?;
        let x = a.entry(0, 1) * &LaurentPolynomial::monomial(c.inv()?, -k);
        let mut word = Vec::new();
        for (lower, p) in &ops {
            self.push_elementary(&mut word, *lower, &-p);
        }
        let sign_fix = if k % 2 == 0 { c } else { -c };
        word.push((format!("H({sign_fix})"), LMatrix::torus(sign_fix, 0)));
        for _ in 0..k.unsigned_abs() {
            if k > 0 {
                self.push_mu(&mut word, Sign::Plus, 0, false);
                self.push_mu(&mut word, Sign::Plus, 1, false);
            } else {
                self.push_mu(&mut word, Sign::Plus, 1, true);
                self.push_mu(&mut word, Sign::Plus, 0, true);
            }
        }
        self.push_elementary(&mut word, false, &x);
        Some(GeneratorWord { letters: word })
    }

    fn random_generator(&self, rng: &mut impl Rng, window: i64) -> LMatrix {
        let q = self.field.order() as u64;
        let a = self.field.element(rng.gen_range(1..q)).unwrap();
        match rng.gen_range(0..4) {
            0 => self.root_element(Sign::Plus, rng.gen_range(-window..=window), a),
            1 => self.root_element(Sign::Minus, rng.gen_range(-window..=window), a),
            2 => LMatrix::torus(a, 0),
            _ => {
                if rng.gen_bool(0.5) {
                    self.s0()
                } else {
                    self.s1()
                }
            }
        }
    }

    /// A random product of `len` generators.
    pub fn random_element(&self, rng: &mut impl Rng, len: usize, window: i64) -> LMatrix {
        (0..len).fold(LMatrix::identity(self.field), |acc, _| &acc * &self.random_generator(rng, window))
    }
}

fn conj_ok(sys: &RGDSystem, g: &LMatrix, by: &LMatrix, sign: Sign, n: i64) -> bool {
    g.conjugate_by(by).is_some_and(|h| sys.root_parameter(&h, sign, n).is_some())
}

/// RGD0–RGD4 plus torus normalization and `t̂` consistency for `|n|, |m| ≤ r`.
pub fn check_rgd_axioms(sys: &RGDSystem, r: i64, seed: u64, samples: usize) -> Vec<LemmaReport> {
    let label = sys.label();
    let q = sys.field.order() as usize;
    let range = || -r..=r;
    let cells = || Sign::BOTH.into_iter().flat_map(move |s| range().map(move |n| (s, n)));

    let rgd0 = cells().map(|(s, n)| {
        let mut g = sys.root_group(s, n);
        g.sort_by_key(|x| x.to_string());
        g.dedup();
        let nontrivial = g.iter().filter(|x| !x.is_identity()).count();
        CaseOutcome::check(g.len() == q && nontrivial == q - 1, || format!("U{s}{n}"), || g.len().to_string(), || q.to_string())
    });
    let mut reports = vec![LemmaReport::from_outcomes(&label, "rgd0", rgd0.collect::<Vec<_>>())];

    let mut rgd1 = LemmaReport::new(&label, "rgd1");
    for s in Sign::BOTH {
        for n in range() {
            for m in range().filter(|&m| m > n) {
                for x in sys.root_group(s, n) {
                    for y in sys.root_group(s, m) {
                        let c = x.commutator(&y).expect("unipotent");
                        rgd1.record(CaseOutcome::check(
                            c.eq_mod_center(&LMatrix::identity(sys.field)),
                            || format!("[{x}, {y}]"),
                            || c.to_string(),
                            || "1".into(),
                        ));
                    }
                }
            }
        }
    }
    reports.push(rgd1);

    // Exhaustive over U_n^{−ε} a U_n^{−ε}: exactly one candidate permutes the family.
    let mut rgd2 = LemmaReport::new(&label, "rgd2");
    let mut index = LemmaReport::new(&label, "rgd2-index");
    for (s, n) in cells() {
        for a in sys.field.nonzero() {
            let g = sys.root_element(s, n, a);
            let reflects = |mu: &LMatrix| cells().all(|(d, m)| sys.root_group(d, m).iter().all(|u| conj_ok(sys, u, mu, d.opposite(), 2 * n - m)));
            let mut found = Vec::new();
            for x in sys.field.elements() {
                for y in sys.field.elements() {
                    let cand = &(&sys.root_element(s.opposite(), n, x) * &g) * &sys.root_element(s.opposite(), n, y);
                    if reflects(&cand) {
                        found.push(cand);
                    }
                }
            }
            let mu = sys.mu_element(s, n, a);
            let ok = found.len() == 1 && found[0] == mu;
            rgd2.record(CaseOutcome::check(ok, || format!("a={g}"), || format!("{} candidates", found.len()), || format!("1 ({mu})")));
            for (d, m) in cells() {
                for u in sys.root_group(d, m) {
                    let c = u.conjugate_by(&mu).unwrap();
                    let got = sys.root_parameter(&c, d.opposite(), 2 * n - m);
                    index.record(CaseOutcome::check(
                        got.is_some(),
                        || format!("mu={mu}, u={u}"),
                        || c.to_string(),
                        || format!("U{}{}", d.opposite(), 2 * n - m),
                    ));
                }
            }
        }
    }
    reports.push(rgd2);
    reports.push(index);

    let mut rgd3 = LemmaReport::new(&label, "rgd3");
    let mut rng = case_rng(seed, "rgd3", 0);
    for (s, n) in cells() {
        for u in sys.root_group(s, n).iter().filter(|u| !u.is_identity()) {
            let inside = sys.in_unipotent(u, s.opposite());
            rgd3.record(CaseOutcome::check(!inside, || u.to_string(), || format!("in U{}", s.opposite()), || "trivial intersection".into()));
        }
        // The membership test accepts genuine products from the opposite side.
        let word = (0..4).fold(LMatrix::identity(sys.field), |acc, _| {
            let m = rng.gen_range(-r..=r);
            let a = sys.field.element(rng.gen_range(0..q as u64)).unwrap();
            &acc * &sys.root_element(s.opposite(), m, a)
        });
        rgd3.record(CaseOutcome::check(sys.in_unipotent(&word, s.opposite()), || word.to_string(), || "rejected".into(), || format!("in U{}", s.opposite())));
    }
    reports.push(rgd3);

    let mut rgd4 = LemmaReport::new(&label, "rgd4");
    for i in 0..samples {
        let mut rng = case_rng(seed, "rgd4", i as u64);
        let g = sys.random_element(&mut rng, 8, r);
        let outcome = match sys.factor(&g) {
            Some(w) => {
                let p = w.product(sys.field);
                let letters_ok = w.letters.iter().all(|(_, x)| sys.torus().contains(x) || is_generator(sys, x));
                CaseOutcome::check(p.eq_mod_center(&g) && letters_ok, || g.to_string(), || p.to_string(), || g.to_string())
            }
            None => CaseOutcome::fail(g.to_string(), "no factorization", "word in H and root groups"),
        };
        rgd4.record(outcome);
    }
    reports.push(rgd4);

    let torus = cells().map(|(s, n)| {
        let ok = sys.torus().iter().all(|h| sys.root_group(s, n).iter().all(|u| conj_ok(sys, u, h, s, n)));
        CaseOutcome::check(ok, || format!("U{s}{n}"), || "not normalized".into(), || "normalized by H".into())
    });
    reports.push(LemmaReport::from_outcomes(&label, "torus-normalizes", torus.collect::<Vec<_>>()));

    let t = sys.t_hat();
    let mut trans = LemmaReport::new(&label, "translation-consistency");
    trans.record(CaseOutcome::check(t.eq_mod_center(&sys.t_hat_power(1)), || "s0 s1".into(), || t.to_string(), || sys.t_hat_power(1).to_string()));
    for s in Sign::BOTH {
        for i in 0..2 {
            for k in -r..=r {
                let tk = sys.t_hat_power(k);
                let ok = sys.root_group(s, i).iter().all(|u| conj_ok(sys, u, &tk, s, 2 * k + i));
                trans.record(CaseOutcome::check(ok, || format!("(U{s}{i})^(t^{k})"), || "mismatch".into(), || format!("U{s}{}", 2 * k + i)));
            }
        }
    }
    reports.push(trans);
    reports
}

fn is_generator(sys: &RGDSystem, x: &LMatrix) -> bool {
    let exps = x.entries().iter().flatten().filter_map(|e| e.as_monomial()).map(|(_, k)| k.abs()).max().unwrap_or(0);
    Sign::BOTH.into_iter().any(|s| (-exps..=exps).any(|n| sys.root_parameter(x, s, n).is_some()))
}
