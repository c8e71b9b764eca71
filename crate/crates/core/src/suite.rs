//! Named suites over instances, the catalogue and the versioned report.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Field, FieldError, Fq};
use crate::moufang::certificate::{coefficient_complement, verify_root_subgroup_certificate};
use crate::moufang::congruences::check_filtration_congruences;
use crate::moufang::faithful::check_faithful_action;
use crate::moufang::hua_group::{check_hua_structure, check_root_subgroup_group};
use crate::moufang::identities::{check_core_identities, SamplePlan};
use crate::moufang::psi::check_psi;
use crate::moufang::quotient::check_local_quotient;
use crate::moufang::{case_rng, Domain, Instance, InstanceError, InstanceKind, InstanceSpec, Point, SeriesDomain};
use crate::mqm::classify::uniqueness_sweep;
use crate::mqm::f9::f9_structure_check;
use crate::mqm::galois::galois_lemma_scan;
use crate::mqm::{classify, MQMap, MqmCase};
use crate::report::{totals, CaseOutcome, LemmaReport};
use crate::rgdtwin::{check_rgd_axioms, check_root_group_fullness, check_twin_axioms, make_rgd};
use crate::tree::{
    check_action_isometry, check_contraction, check_filtration, check_local_isomorphism, check_local_moufang_ball, check_tree_degree,
    check_trivial_action_up_the_ray, reflection_grid, Ball, Mobius, TreeError, TreeModel,
};

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}; see `list`")]
    UnknownSuite(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("suite {suite} needs {needs}")]
    Unsupported { suite: String, needs: &'static str },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// What a suite runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Needs {
    /// `ff:` or any series instance.
    AnyInstance,
    /// A series instance (`laurent:` or `hermitian:`).
    Series,
    /// An untwisted `laurent:q=..` instance.
    Tree,
    /// Only the field order of the instance is used.
    FieldOrder,
    /// Runs without an instance.
    Nothing,
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub verifies: &'static str,
    pub needs: Needs,
}

pub const CATALOG: &[SuiteInfo] = &[
    SuiteInfo {
        name: "core-identities",
        verifies: "Lemmas mumaps/basic-formulas/hab/biadditivity; also mua=mub(ii), specialness, mu-uniqueness",
        needs: Needs::AnyInstance,
    },
    SuiteInfo {
        name: "congruences",
        verifies: "tau, hua-maps(first/second), hua-stability(i)/(ii) congruences along the valuation filtration",
        needs: Needs::Series,
    },
    SuiteInfo { name: "quotient", verifies: "U_n/U_{n+1} carries a Moufang set isomorphic to M(F_q)", needs: Needs::Series },
    SuiteInfo {
        name: "hua-group",
        verifies: "Hua group of a root subgroup is cyclic of order |(F*)²|; Hua group structure on U_n/U_{n+2}",
        needs: Needs::AnyInstance,
    },
    SuiteInfo { name: "certificate", verifies: "coefficient complements of U_{i+1} in U_i are normalized root subgroups", needs: Needs::Series },
    SuiteInfo { name: "psi", verifies: "psi on U_{n+1}/U_{n+2} is multiplicative quadratic with exponent 1+p^s, s ≤ r/2", needs: Needs::Series },
    SuiteInfo { name: "faithful", verifies: "Hua words fixing the two complements fix all probes", needs: Needs::Series },
    SuiteInfo {
        name: "tree",
        verifies: "tree degree q+1, stabilizer filtration of x_n, reflection x_m -> x_{2n-m} by mu_a, isometric parity-uniform action",
        needs: Needs::Tree,
    },
    SuiteInfo {
        name: "local-moufang",
        verifies: "Moufang set on the neighbors of each vertex is M(F_q) and matches the quotient at x_n; trivial action up the ray",
        needs: Needs::Tree,
    },
    SuiteInfo { name: "contraction", verifies: "root group elements contract under a translation toward their end, opposite ones do not", needs: Needs::Tree },
    SuiteInfo { name: "mqm", verifies: "multiplicative quadratic maps between finite fields are a^(p^k+p^l), uniquely", needs: Needs::Nothing },
    SuiteInfo { name: "galois", verifies: "x⁻¹x^σ ∈ Fix(σ) on squares forces σ = 1 except on F_9", needs: Needs::Nothing },
    SuiteInfo { name: "f9", verifies: "three mutually normalizing copies of F_9 in Mat_2(F_3)", needs: Needs::Nothing },
    SuiteInfo { name: "rgd", verifies: "RGD0-RGD4 for the root groups of SL_2(F_q[t,t⁻¹]), index law m -> 2n-m", needs: Needs::FieldOrder },
    SuiteInfo { name: "twin-axioms", verifies: "codistance (a)/(b), twin apartment |n-m|, parity and invariance", needs: Needs::FieldOrder },
    SuiteInfo { name: "root-group-fullness", verifies: "twin root groups act regularly on the twin apartments through a root", needs: Needs::FieldOrder },
];

pub fn catalog_lines() -> Vec<String> {
    CATALOG.iter().map(|s| format!("{} ({})", s.name, s.verifies)).collect()
}

/// One run: which suite, on which instance, with which bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub instance: Option<String>,
    pub suite: String,
    pub seed: u64,
    pub precision: i64,
    pub samples: usize,
    pub radius: Option<u64>,
    pub depth: Option<u64>,
}

impl SuiteConfig {
    pub fn new(suite: impl Into<String>, instance: Option<&str>) -> Self {
        SuiteConfig { instance: instance.map(str::to_string), suite: suite.into(), seed: 0, precision: 12, samples: 200, radius: None, depth: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub cases: u64,
    pub passed: u64,
    pub failed: u64,
    pub undecided: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub config: SuiteConfig,
    pub totals: Totals,
    pub reports: Vec<LemmaReport>,
    pub wall_time_ms: u64,
}

impl SuiteReport {
    pub fn failures(&self) -> u64 {
        self.totals.failed
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report")
    }
}

fn ensure(cfg: &SuiteConfig, needs: Needs) -> Result<Option<InstanceSpec>, SuiteError> {
    let unsupported = |needs| SuiteError::Unsupported { suite: cfg.suite.clone(), needs };
    let spec = match (&cfg.instance, needs) {
        (_, Needs::Nothing) => return Ok(None),
        (None, _) => return Err(unsupported("--instance")),
        (Some(s), _) => s.parse::<InstanceSpec>()?,
    };
    match (needs, spec.kind) {
        (Needs::Series, InstanceKind::FiniteField) => Err(unsupported("a laurent: or hermitian: instance")),
        (Needs::Tree, InstanceKind::Laurent) if spec.theta == 0 => Ok(Some(spec)),
        (Needs::Tree, _) => Err(unsupported("an untwisted laurent: instance")),
        _ => Ok(Some(spec)),
    }
}

fn series(spec: InstanceSpec, cfg: &SuiteConfig) -> Result<SeriesDomain, SuiteError> {
    Ok(SeriesDomain::new(spec, cfg.precision)?)
}

fn tree_words(model: &TreeModel, seed: u64, count: usize) -> Vec<(String, Mobius)> {
    let f = model.field();
    let mut rng = case_rng(seed, "tree-words", 0);
    let q = f.order() as u64;
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=4);
            let mut names = Vec::new();
            let mut g = Mobius::identity(f);
            for _ in 0..len {
                let c: Fq = f.element(rng.gen_range(1..q)).unwrap();
                let e = rng.gen_range(-2..=2);
                let b = crate::algebra::LaurentPolynomial::monomial(c, e);
                let (name, h) = match rng.gen_range(0..4) {
                    0 => (format!("alpha({b})"), model.alpha_poly(&b)),
                    1 => (format!("opp({b})"), model.opposite(&b.to_series())),
                    2 => (format!("mu({b})"), model.mu_poly(&b).expect("monomial inverse")),
                    _ => (format!("diag^{e}"), model.translation(e)),
                };
                names.push(name);
                g = g.then(&h);
            }
            (names.join("*"), g)
        })
        .collect()
}

fn mqm_reports() -> Vec<LemmaReport> {
    let f = |q: u64| Field::of_order(q).expect("prime power");
    let emb = f(3).embedding_into(f(9)).expect("F_3 ≤ F_9");
    let norm = MQMap::from_fn(f(9), f(3), |x| emb.preimage(x.pow(4)).expect("norm lands in F_3")).expect("table");
    let got = classify(&norm);
    let ok = matches!(&got, Ok(c) if (c.case, c.k, c.l) == (MqmCase::NormForm, 0, 1) && c.unique);
    let mut reports = vec![LemmaReport::single(
        "mqm",
        "mqm-norm-f9-f3",
        CaseOutcome::check(ok, || "N: F_9 -> F_3".into(), || format!("{got:?}"), || "norm-form (0,1)".into()),
    )];

    let squaring = (2..=81u64).filter_map(|q| Field::of_order(q).ok()).map(|k| {
        let got = MQMap::from_fn(k, k, |x| x * x).map_err(|e| e.to_string()).and_then(|m| classify(&m).map_err(|e| e.to_string()));
        let ok = matches!(&got, Ok(c) if (c.case, c.k, c.l) == (MqmCase::PairOfEmbeddings, 0, 0) && c.unique);
        CaseOutcome::check(ok, || format!("x^2 on F_{}", k.order()), || format!("{got:?}"), || "pair (0,0)".into())
    });
    reports.push(LemmaReport::from_outcomes("mqm", "mqm-squaring", squaring.collect::<Vec<_>>()));

    let sweep = uniqueness_sweep(27, 81);
    let passes = (0..sweep.maps - sweep.failures.len()).map(|_| CaseOutcome::pass());
    let fails = sweep.failures.iter().map(|w| CaseOutcome::fail(w.clone(), "misclassified", "own pair, unique"));
    reports.push(LemmaReport::from_outcomes("mqm", "mqm-uniqueness(|K|<=27,|L|<=81)", passes.chain(fails).collect::<Vec<_>>()));
    reports
}

fn galois_reports(bound: u32) -> Vec<LemmaReport> {
    let scan = galois_lemma_scan(bound);
    let cases = scan.cases.iter().map(|c| {
        let expected = c.k == 0 || (c.q, c.k) == (9, 1);
        CaseOutcome::check(c.holds == expected, || format!("q={} k={}", c.q, c.k), || c.holds.to_string(), || expected.to_string())
    });
    let scan_report = LemmaReport::from_outcomes("galois", format!("galois-scan(bound={bound})"), cases.collect::<Vec<_>>());
    let ex = scan.exceptions();
    let single = CaseOutcome::check(ex == [(9, 1)], || format!("bound={bound}"), || format!("{ex:?}"), || "[(9, 1)]".into());
    vec![scan_report, LemmaReport::single("galois", "galois-exceptions", single)]
}

fn f9_reports() -> Vec<LemmaReport> {
    let r = f9_structure_check();
    vec![LemmaReport::single(
        "f9",
        "f9-structure",
        CaseOutcome::check(r.ok(), || "Mat_2(F_3)".into(), || format!("{r:?}"), || "3 mutually normalizing F_9".into()),
    )]
}

fn run_reports(cfg: &SuiteConfig) -> Result<Vec<LemmaReport>, SuiteError> {
    let info = CATALOG.iter().find(|s| s.name == cfg.suite).ok_or_else(|| SuiteError::UnknownSuite(cfg.suite.clone()))?;
    let spec = ensure(cfg, info.needs)?;
    let (seed, samples) = (cfg.seed, cfg.samples);
    let reports = match info.name {
        "core-identities" => match Instance::build(spec.unwrap(), cfg.precision)? {
            Instance::Finite(d) => check_core_identities(&d, SamplePlan::Exhaustive),
            Instance::Series(d) => check_core_identities(&d, SamplePlan::Random { samples, seed }),
        },
        "congruences" => check_filtration_congruences(&series(spec.unwrap(), cfg)?, samples, seed),
        "quotient" => {
            let d = series(spec.unwrap(), cfg)?;
            (0..=1).flat_map(|n| check_local_quotient(&d, n, seed)).collect()
        }
        "hua-group" => match Instance::build(spec.unwrap(), cfg.precision)? {
            Instance::Finite(d) => vec![check_root_subgroup_group(&d, &d.exhaustive().expect("finite"))],
            Instance::Series(d) => {
                let mut r: Vec<LemmaReport> = (0..=1).map(|i| check_root_subgroup_group(&d, &coefficient_complement(&d, i))).collect();
                r.extend((0..=1).map(|n| check_hua_structure(&d, n)));
                r
            }
        },
        "certificate" => {
            let d = series(spec.unwrap(), cfg)?;
            (0..=1).flat_map(|i| verify_root_subgroup_certificate(&d, &coefficient_complement(&d, i), i, seed)).collect()
        }
        "psi" => {
            let d = series(spec.unwrap(), cfg)?;
            (0..=1).flat_map(|n| check_psi(&d, n, seed)).collect()
        }
        "faithful" => vec![check_faithful_action(&series(spec.unwrap(), cfg)?, cfg.depth.unwrap_or(4) as usize, seed)],
        "tree" => {
            let model = TreeModel::for_domain(&series(spec.unwrap(), cfg)?)?;
            let ball = Ball::new(model.x(0), cfg.radius.unwrap_or(5));
            vec![
                check_tree_degree(&model, &ball),
                check_filtration(&model, seed, samples),
                reflection_grid(&model, seed, 4),
                check_action_isometry(&model, &ball, &tree_words(&model, seed, 100), seed, 5),
            ]
        }
        "local-moufang" => {
            let d = series(spec.unwrap(), cfg)?;
            let model = TreeModel::for_domain(&d)?;
            let mut r = vec![check_local_moufang_ball(&model, cfg.radius.unwrap_or(3))];
            r.extend((0..=1).map(|n| check_local_isomorphism(&d, &model.x(n), n, seed)));
            r.push(check_trivial_action_up_the_ray(&model, &model.x(0), &Point::Inf, cfg.depth.unwrap_or(3)));
            r
        }
        "contraction" => {
            let model = TreeModel::for_domain(&series(spec.unwrap(), cfg)?)?;
            vec![check_contraction(&model, cfg.depth.unwrap_or(6), 8)]
        }
        "mqm" => mqm_reports(),
        "galois" => galois_reports(cfg.radius.unwrap_or(128) as u32),
        "f9" => f9_reports(),
        "rgd" => check_rgd_axioms(&make_rgd(Field::of_order(spec.unwrap().q)?), cfg.radius.unwrap_or(4) as i64, seed, samples),
        "twin-axioms" => {
            let sys = make_rgd(Field::of_order(spec.unwrap().q)?);
            let mut r = check_twin_axioms(&sys, cfg.radius.unwrap_or(4), seed, samples);
            r.extend((0..=1).map(|k| check_root_group_fullness(&sys, k, cfg.depth.unwrap_or(2))));
            r
        }
        "root-group-fullness" => {
            let sys = make_rgd(Field::of_order(spec.unwrap().q)?);
            (-1..=2).map(|k| check_root_group_fullness(&sys, k, cfg.depth.unwrap_or(2))).collect()
        }
        _ => unreachable!("catalogue entries are all handled"),
    };
    Ok(reports)
}

/// Runs one suite; reports are sorted by `(instance, lemma)`.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    let start = Instant::now();
    let mut reports = run_reports(cfg)?;
    reports.sort_by(|a, b| (&a.instance, &a.lemma).cmp(&(&b.instance, &b.lemma)));
    let (cases, passed, failed, undecided) = totals(&reports);
    Ok(SuiteReport {
        schema: SCHEMA_VERSION,
        config: cfg.clone(),
        totals: Totals { cases, passed, failed, undecided },
        reports,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_lines() {
        let lines = catalog_lines();
        assert!(lines.len() >= 12);
        assert!(lines.iter().any(|l| l.starts_with("core-identities (Lemmas mumaps/basic-formulas/hab/biadditivity")));
        assert!(lines.iter().any(|l| l.starts_with("twin-axioms (codistance (a)/(b)")));
    }

    #[test]
    fn errors() {
        assert!(matches!(run_suite(&SuiteConfig::new("nope", Some("ff:q=5"))), Err(SuiteError::UnknownSuite(_))));
        let e = run_suite(&SuiteConfig::new("core-identities", Some("ff:q=6"))).unwrap_err();
        assert_eq!(e.to_string(), "6 is not a prime power");
        assert!(matches!(run_suite(&SuiteConfig::new("congruences", Some("ff:q=5"))), Err(SuiteError::Unsupported { .. })));
        assert!(matches!(run_suite(&SuiteConfig::new("tree", Some("laurent:q=4,theta=1"))), Err(SuiteError::Unsupported { .. })));
    }

    #[test]
    fn deterministic_modulo_wall_time() {
        let cfg = SuiteConfig::new("core-identities", Some("ff:q=3"));
        let (mut a, mut b) = (run_suite(&cfg).unwrap(), run_suite(&cfg).unwrap());
        a.wall_time_ms = 0;
        b.wall_time_ms = 0;
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.failures(), 0);
    }
}
