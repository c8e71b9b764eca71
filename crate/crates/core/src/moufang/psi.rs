//! The map `ψ: U_n/U_{n+1} → End(U_{n+1}/U_{n+2})` induced by the Hua maps
//! `h_a = μ_e μ_a`, `e = t^n`, and its closed form `x ψ_y = x ι(y)^{1+p^s}`.

use std::cell::RefCell;

use serde::Serialize;

use super::instance::{case_rng, Domain, SeriesDomain};
use crate::algebra::{Embedding, Field, Fq, SkewLaurent};
use crate::mqm::{classify, Classification, ClassifyError, FpMatrix, MQMap, Table};
use crate::report::{CaseOutcome, LemmaReport};

/// The subfield of `K` of allowed coefficients at one exponent, as a field.
struct Level {
    field: Field,
    into_k: Embedding,
}

impl Level {
    fn new(dom: &SeriesDomain, e: i64) -> Level {
        let field = Field::of_order(dom.quotient_order(e) as u64).expect("prime power");
        let into_k = field.embedding_into(dom.field()).expect("allowed coefficients form a subfield");
        Level { field, into_k }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiResult {
    pub level: i64,
    pub classification: Classification,
    /// `ψ_y` is right multiplication by `ι(y)^{1+p^s}`, `0 ≤ s ≤ r/2`.
    pub s: u32,
    /// `ι = Frob^{iota_frobenius}` after the canonical embedding.
    pub iota_frobenius: u32,
    /// `r = [F : F_p]`.
    pub r: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PsiError {
    #[error("{0} is undetermined at this precision")]
    Undetermined(String),
    #[error("h_a sends {0} outside U_{{n+1}}")]
    LeavesLevel(String),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// `ψ` as an `End_{F_p}(E)`-valued table on `F`.
pub fn psi_map(dom: &SeriesDomain, n: i64) -> Result<MQMap, PsiError> {
    psi_map_with(dom, n, |_| dom.zero())
}

/// As [`psi_map`], with `a = ι(y) t^n + perturb(y)`.
fn psi_map_with(dom: &SeriesDomain, n: i64, perturb: impl Fn(Fq) -> SkewLaurent) -> Result<MQMap, PsiError> {
    let (f, e) = (Level::new(dom, n), Level::new(dom, n + 1));
    let set = dom.moufang_set(dom.monomial(dom.field().one(), n)).expect("t^n is invertible");
    let table = f
        .field
        .elements()
        .map(|y| {
            let a = &dom.monomial(f.into_k.apply(y), n) + &perturb(y);
            let err = RefCell::new(None);
            let m = FpMatrix::of_linear_map(e.field, |c| {
                let x = dom.monomial(e.into_k.apply(c), n + 1);
                let image = match set.hua(&a, &x) {
                    Ok(v) => v,
                    Err(_) => {
                        err.borrow_mut().get_or_insert(PsiError::Undetermined(format!("x h_a for a={a} x={x}")));
                        return e.field.zero();
                    }
                };
                match (image.valuation_at_least(n + 1), image.coeff(n + 1)) {
                    (Some(true), Some(coeff)) => e.into_k.preimage(coeff).unwrap_or_else(|| {
                        err.borrow_mut().get_or_insert(PsiError::LeavesLevel(image.to_string()));
                        e.field.zero()
                    }),
                    (Some(false), _) => {
                        err.borrow_mut().get_or_insert(PsiError::LeavesLevel(image.to_string()));
                        e.field.zero()
                    }
                    _ => {
                        err.borrow_mut().get_or_insert(PsiError::Undetermined(image.to_string()));
                        e.field.zero()
                    }
                }
            });
            err.into_inner().map_or(Ok(m), Err)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MQMap::new(f.field, e.field, Table::End(table)).expect("shape"))
}

/// Classifies `ψ` and rewrites its pair `{Frob^k ι, Frob^l ι}` as `ι'(y)^{1+p^s}`.
pub fn psi_map_classify(dom: &SeriesDomain, n: i64) -> Result<PsiResult, PsiError> {
    let map = psi_map(dom, n)?;
    let classification = classify(&map)?;
    let r = map.domain.degree();
    let d = classification.l - classification.k;
    let (s, iota_frobenius) = if 2 * d <= r { (d, classification.k) } else { (r - d, classification.l) };
    Ok(PsiResult { level: n, classification, s, iota_frobenius, r })
}

/// `ψ` is a valid multiplicative quadratic map, depends only on the coset
/// of `a`, and equals `x ↦ x ι(y)^{1+p^s}` with `0 ≤ s ≤ r/2`.
pub fn check_psi(dom: &SeriesDomain, n: i64, seed: u64) -> Vec<LemmaReport> {
    let label = dom.label();
    let inputs = || format!("n={n}");
    let mut reports = Vec::new();
    let map = match psi_map(dom, n) {
        Ok(m) => m,
        Err(e) => {
            let o = CaseOutcome::undecided(inputs(), e.to_string(), "ψ table");
            return vec![LemmaReport::single(label, format!("psi-quadratic(n={n})"), o)];
        }
    };
    let verdict = map.verify();
    reports.push(LemmaReport::single(
        &label,
        format!("psi-quadratic(n={n})"),
        CaseOutcome::check(verdict.valid(), inputs, || format!("{verdict:?}"), || "multiplicative quadratic map".into()),
    ));

    let mut rng = case_rng(seed, "psi", n as u64);
    let perturbations: Vec<SkewLaurent> = (0..4).map(|_| dom.sample_at_least(&mut rng, n + 1)).collect();
    let mut coset = LemmaReport::new(&label, format!("psi-coset-invariance(n={n})"));
    for u in &perturbations {
        let outcome = match psi_map_with(dom, n, |y| if y.is_zero() { dom.zero() } else { u.clone() }) {
            Ok(m) => CaseOutcome::check(m == map, || format!("n={n} u={u}"), || m.to_string(), || map.to_string()),
            Err(e) => CaseOutcome::undecided(format!("n={n} u={u}"), e.to_string(), "ψ table"),
        };
        coset.record(outcome);
    }
    reports.push(coset);

    let closed = match psi_map_classify(dom, n) {
        Ok(res) => {
            let ok = 2 * res.s <= res.r && closed_form_holds(&map, &res);
            CaseOutcome::check(ok, inputs, || format!("s={} r={} ι=Frob^{}", res.s, res.r, res.iota_frobenius), || "x ψ_y = x ι(y)^{1+p^s}".into())
        }
        Err(e) => CaseOutcome::fail(inputs(), e.to_string(), "classification"),
    };
    reports.push(LemmaReport::single(&label, format!("psi-closed-form(n={n})"), closed));
    reports
}

/// Direct check of `x ψ_y = x · ι'(y)^{1+p^s}` inside a common extension.
fn closed_form_holds(map: &MQMap, res: &PsiResult) -> bool {
    let Table::End(table) = &map.table else { return false };
    let p = map.domain.characteristic();
    let big = Field::new(p, res.classification.target_degree).expect("bounded");
    let embed = |k: Field| (k != big).then(|| k.embedding_into(big).expect("divides"));
    let (iota, j) = (embed(map.domain), embed(map.target));
    let lift = |e: &Option<Embedding>, x: Fq| e.as_ref().map_or(x, |e| e.apply(x));
    map.domain.elements().all(|y| {
        let iy = lift(&iota, y).frobenius(res.iota_frobenius as i64);
        let factor = iy * iy.frobenius(res.s as i64);
        map.target.elements().all(|x| lift(&j, table[y.index() as usize].apply(x)) == lift(&j, x) * factor)
    })
}
