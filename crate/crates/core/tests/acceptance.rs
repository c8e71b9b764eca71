//! Exit gate: one line per acceptance criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use moufang_lab::algebra::Field;
use moufang_lab::moufang::certificate::{coefficient_complement, verify_root_subgroup_certificate};
use moufang_lab::moufang::congruences::check_filtration_congruences;
use moufang_lab::moufang::faithful::check_faithful_action;
use moufang_lab::moufang::hua_group::{hua_root_subgroup_group, square_class_order};
use moufang_lab::moufang::identities::{check_core_identities, SamplePlan};
use moufang_lab::moufang::psi::{check_psi, psi_map_classify};
use moufang_lab::moufang::{FiniteDomain, MoufangSet, SeriesDomain, Tolerance};
use moufang_lab::report::{totals, LemmaReport};
use moufang_lab::rgdtwin::{check_rgd_axioms, check_root_group_fullness, check_twin_axioms, make_rgd};
use moufang_lab::suite::{run_suite, SuiteConfig};
use moufang_lab::tree::{check_contraction, check_local_isomorphism, check_local_moufang_ball, TreeModel};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn field(q: u64) -> Field {
    Field::of_order(q).unwrap()
}

fn series(spec: &str, n: i64) -> SeriesDomain {
    SeriesDomain::new(spec.parse().unwrap(), n).unwrap()
}

/// Every report clean (no failures, nothing undecided).
fn all_clean(reports: &[LemmaReport]) -> Outcome {
    let (cases, _, failed, undecided) = totals(reports);
    match reports.iter().find(|r| !r.clean()) {
        None => Ok(format!("{} reports, {cases} cases", reports.len())),
        Some(r) => Err(format!("{} on {}: {} failed, {} undecided of {} {:?}", r.lemma, r.instance, failed, undecided, r.cases, r.counterexamples.first())),
    }
}

fn within(start: Instant, limit: Duration, detail: String) -> Outcome {
    let t = start.elapsed();
    if t < limit {
        Ok(detail)
    } else {
        Err(format!("{detail}, but took {t:.1?} (limit {limit:?})"))
    }
}

fn require_names(reports: &[LemmaReport], names: &[&str]) -> Result<(), String> {
    for name in names {
        if !reports.iter().any(|r| r.lemma == *name) {
            return Err(format!("no report named {name}"));
        }
    }
    Ok(())
}

fn c1_core_identities() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for q in [2, 3, 4, 5, 7, 8, 9, 11, 13] {
        let r = check_core_identities(&FiniteDomain::new(field(q)), SamplePlan::Exhaustive);
        require_names(
            &r,
            &[
                "mumaps(i)",
                "mumaps(ii)",
                "mumaps(iii)",
                "mumaps(iv)",
                "basic-formulas(i)",
                "basic-formulas(ii)",
                "hab",
                "mua=mub(ii)",
                "biadditivity(i)",
                "biadditivity(ii)",
                "specialness",
            ],
        )?;
        // Over F_2 there is a single nonzero element, so a' != b' never holds.
        let vacuous = |x: &LemmaReport| q == 2 && x.lemma == "basic-formulas(ii)" && x.cases == 0 && x.failed == 0;
        reports.extend(r.into_iter().filter(|x| !vacuous(x)));
    }
    let detail = all_clean(&reports)?;
    within(start, Duration::from_secs(10), detail)
}

fn c2_congruences() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for spec in ["laurent:q=3", "laurent:q=5", "laurent:q=4,theta=1"] {
        let r = check_filtration_congruences(&series(spec, 12), 200, 0);
        require_names(&r, &["tau", "hua-maps(first)", "hua-maps(second)", "hua-stability(i)", "hua-stability(ii)"])?;
        if let Some(short) = r.iter().find(|x| x.cases != 200) {
            return Err(format!("{} has {} cases", short.lemma, short.cases));
        }
        reports.extend(r);
    }
    let detail = all_clean(&reports)?;
    within(start, Duration::from_secs(30), detail)
}

fn c3_tree() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for q in [2, 3] {
        let spec = format!("laurent:q={q}");
        let cfg = SuiteConfig { radius: Some(5), ..SuiteConfig::new("tree", Some(&spec)) };
        let r = run_suite(&cfg).map_err(|e| e.to_string())?.reports;
        require_names(&r, &["tree-degree", "stabilizer-filtration", "reflection", "action-isometry"])?;
        reports.extend(r);
    }
    let detail = all_clean(&reports)?;
    within(start, Duration::from_secs(60), detail)
}

fn c4_local_moufang() -> Outcome {
    let mut reports = Vec::new();
    for q in [2, 3] {
        let dom = series(&format!("laurent:q={q}"), 12);
        let model = TreeModel::for_domain(&dom).map_err(|e| e.to_string())?;
        reports.push(check_local_moufang_ball(&model, 3));
        for n in [0, 1] {
            reports.push(check_local_isomorphism(&dom, &model.x(n), n, 0));
        }
    }
    all_clean(&reports)
}

fn c5_hua_structure() -> Outcome {
    for q in [3, 5, 7, 9] {
        let f = field(q);
        let set = MoufangSet::new(f.one()).unwrap();
        let v: Vec<_> = f.elements().collect();
        let h = hua_root_subgroup_group(&set, &v, Tolerance::EXACT).map_err(|e| e.to_string())?;
        if !(h.cyclic && h.order() == square_class_order(q as usize)) {
            return Err(format!("q={q}: order {} cyclic={}", h.order(), h.cyclic));
        }
    }
    let mut reports = Vec::new();
    for q in [2, 3, 5] {
        let dom = series(&format!("laurent:q={q}"), 12);
        for i in [0, 1] {
            reports.extend(verify_root_subgroup_certificate(&dom, &coefficient_complement(&dom, i), i, 0));
        }
    }
    let mut forms = Vec::new();
    for spec in ["laurent:q=2", "laurent:q=3", "laurent:q=4", "laurent:q=9", "laurent:q=4,theta=1", "laurent:q=8,theta=1", "hermitian:q=4,theta=1,sigma=theta"]
    {
        let dom = series(spec, 12);
        for n in [0, 1] {
            let p = psi_map_classify(&dom, n).map_err(|e| format!("{spec} n={n}: {e}"))?;
            if 2 * p.s > p.r {
                return Err(format!("{spec} n={n}: s={} exceeds r/2 for r={}", p.s, p.r));
            }
            forms.push(format!("1+p^{}", p.s));
            reports.extend(check_psi(&dom, n, 0));
        }
    }
    forms.sort();
    forms.dedup();
    all_clean(&reports).map(|d| format!("{d}; psi forms {}", forms.join(", ")))
}

fn c6_mqm() -> Outcome {
    let start = Instant::now();
    let reports: Vec<LemmaReport> = ["mqm", "galois", "f9"].iter().flat_map(|s| run_suite(&SuiteConfig::new(*s, None)).unwrap().reports).collect();
    require_names(&reports, &["mqm-norm-f9-f3", "mqm-squaring", "galois-scan(bound=128)", "galois-exceptions", "f9-structure"])?;
    let detail = all_clean(&reports)?;
    within(start, Duration::from_secs(20), detail)
}

fn c7_rgd() -> Outcome {
    let mut reports = Vec::new();
    for q in [2, 3, 4] {
        let r = check_rgd_axioms(&make_rgd(field(q)), 4, 0, 50);
        require_names(&r, &["rgd0", "rgd1", "rgd2", "rgd2-index", "rgd3", "rgd4"])?;
        reports.extend(r);
    }
    all_clean(&reports)
}

fn c8_twin() -> Outcome {
    let mut reports = Vec::new();
    for q in [2, 3] {
        let sys = make_rgd(field(q));
        let r = check_twin_axioms(&sys, 4, 0, 100);
        require_names(&r, &["twin-axioms", "twin-apartment", "twin-opposite"])?;
        reports.extend(r);
        for k in [0, 1] {
            reports.push(check_root_group_fullness(&sys, k, 2));
        }
    }
    all_clean(&reports)
}

fn c9_contraction() -> Outcome {
    let reports: Vec<LemmaReport> = [2, 3].iter().map(|&q| check_contraction(&TreeModel::new(field(q)), 6, 8)).collect();
    all_clean(&reports)
}

fn c10_faithful() -> Outcome {
    let reports: Vec<LemmaReport> = ["laurent:q=2", "laurent:q=3"].iter().map(|s| check_faithful_action(&series(s, 10), 4, 0)).collect();
    all_clean(&reports)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("core identities over M(F_q), q <= 13", c1_core_identities),
        ("filtration congruences, N = 12, 200 samples", c2_congruences),
        ("tree structure, radius 5", c3_tree),
        ("local Moufang sets and quotients", c4_local_moufang),
        ("Hua groups, certificates, psi exponent forms", c5_hua_structure),
        ("multiplicative quadratic maps, Galois scan, F_9", c6_mqm),
        ("RGD axioms, |n|,|m| <= 4", c7_rgd),
        ("twin tree codistance and fullness", c8_twin),
        ("contraction groups, depth 6", c9_contraction),
        ("faithful Hua action, L = 4, N = 10", c10_faithful),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match outcome {
            Ok(d) => println!("criterion {:>2} PASS {name} ({t:.2?}): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({t:.2?}): {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
