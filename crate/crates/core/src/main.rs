use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use moufang_lab::algebra::Field;
use moufang_lab::moufang::{InstanceSpec, SeriesDomain};
use moufang_lab::mqm::f9::f9_structure_check;
use moufang_lab::mqm::galois::galois_lemma_scan;
use moufang_lab::mqm::{classify, MQMap};
use moufang_lab::report::Verdict;
use moufang_lab::suite::{catalog_lines, run_suite, SuiteConfig, SuiteReport};
use moufang_lab::tree::{Ball, TreeModel};

#[derive(Parser)]
#[command(name = "moufang-lab", version, about = "Checks Moufang sets, their trees and the twin tree of SL_2(F_q[t,t⁻¹])")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite on one instance.
    Run {
        #[arg(long)]
        instance: Option<String>,
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        precision: i64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        radius: Option<u64>,
        #[arg(long)]
        depth: Option<u64>,
        /// Write the JSON report to a file, or `-` for stdout.
        #[arg(long)]
        json: Option<String>,
        /// Write the ball around x_0 as Graphviz (tree instances only).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// List the suites and what each verifies.
    List,
    /// Classify a multiplicative quadratic map given as a table file.
    ClassifyMqm { file: PathBuf },
    /// Scan all finite fields up to a bound for the Galois condition.
    ScanGalois {
        #[arg(long, default_value_t = 128)]
        bound: u32,
    },
    /// Subfields of order 9 in Mat_2(F_3).
    F9Check,
    /// Codistance axioms and root group fullness for the twin tree over F_q.
    Twin {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 4)]
        radius: u64,
        #[arg(long, default_value_t = 2)]
        depth: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        json: Option<String>,
    },
}

/// `println!` that exits quietly when the reader has gone away.
macro_rules! say {
    ($($arg:tt)*) => {{
        let mut out = std::io::stdout().lock();
        if let Err(e) = writeln!(out, $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("cannot write to stdout: {e}");
        }
    }};
}

fn emit(json: &str, target: Option<&str>) -> Result<(), String> {
    match target {
        Some("-") => {
            say!("{json}");
            Ok(())
        }
        Some(path) => fs::write(path, format!("{json}\n")).map_err(|e| format!("cannot write {path}: {e}")),
        None => Ok(()),
    }
}

fn print_summary(report: &SuiteReport) {
    for r in &report.reports {
        let verdict = if r.failed > 0 {
            Verdict::Fail
        } else if r.undecided > 0 {
            Verdict::Undecided
        } else {
            Verdict::Pass
        };
        say!(
            "{:<9} {} {}: {}/{} passed, {} failed, {} undecided",
            format!("{verdict:?}").to_uppercase(),
            r.instance,
            r.lemma,
            r.passed,
            r.cases,
            r.failed,
            r.undecided
        );
        for c in &r.counterexamples {
            say!("          {} : {} vs {}", c.inputs, c.lhs, c.rhs);
        }
    }
    let t = report.totals;
    say!("total: {} cases, {} passed, {} failed, {} undecided ({} ms)", t.cases, t.passed, t.failed, t.undecided, report.wall_time_ms);
}

fn write_dot(instance: Option<&str>, precision: i64, radius: u64, path: &PathBuf) -> Result<(), String> {
    let spec: InstanceSpec = instance.ok_or("--dot needs --instance")?.parse().map_err(|e| format!("{e}"))?;
    let dom = SeriesDomain::new(spec, precision).map_err(|e| e.to_string())?;
    let model = TreeModel::for_domain(&dom).map_err(|e| e.to_string())?;
    fs::write(path, Ball::new(model.x(0), radius).to_dot()).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Run { instance, suite, seed, precision, samples, radius, depth, json, dot } => {
            let cfg = SuiteConfig { instance: instance.clone(), suite, seed, precision, samples, radius, depth };
            let report = run_suite(&cfg).map_err(|e| e.to_string())?;
            if let Some(path) = &dot {
                write_dot(instance.as_deref(), precision, radius.unwrap_or(3), path)?;
            }
            if json.as_deref() != Some("-") {
                print_summary(&report);
            }
            emit(&report.to_json(), json.as_deref())?;
            Ok(report.failures() == 0)
        }
        Command::List => {
            for line in catalog_lines() {
                say!("{line}");
            }
            Ok(true)
        }
        Command::ClassifyMqm { file } => {
            let text = fs::read_to_string(&file).map_err(|e| format!("cannot read {}: {e}", file.display()))?;
            let map = MQMap::parse(&text).map_err(|e| e.to_string())?;
            let c = classify(&map).map_err(|e| e.to_string())?;
            say!("{}", serde_json::to_string(&c).expect("serializable"));
            Ok(true)
        }
        Command::ScanGalois { bound } => {
            let scan = galois_lemma_scan(bound);
            let out = serde_json::json!({ "bound": scan.bound, "fields": scan.fields, "exceptions": scan.exceptions(), "cases": scan.cases });
            say!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
            Ok(true)
        }
        Command::F9Check => {
            let r = f9_structure_check();
            say!("{}", serde_json::to_string_pretty(&r).expect("serializable"));
            Ok(r.ok())
        }
        Command::Twin { q, radius, depth, seed, samples, json } => {
            Field::of_order(q).map_err(|e| e.to_string())?;
            let cfg = SuiteConfig {
                instance: Some(format!("ff:q={q}")),
                suite: "twin-axioms".into(),
                seed,
                precision: 12,
                samples,
                radius: Some(radius),
                depth: Some(depth),
            };
            let report = run_suite(&cfg).map_err(|e| e.to_string())?;
            if json.as_deref() != Some("-") {
                print_summary(&report);
            }
            emit(&report.to_json(), json.as_deref())?;
            Ok(report.failures() == 0)
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("MOUFANG_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cli = Cli::parse();
    let result = run(cli);
    let _ = std::io::stdout().flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
