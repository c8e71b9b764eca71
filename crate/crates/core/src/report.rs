//! Verdicts, per-lemma tallies and the versioned JSON report.

use serde::Serialize;

/// Outcome of a single checked case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub inputs: String,
    pub lhs: String,
    pub rhs: String,
    /// For congruences: required valuation minus observed valuation.
    pub valuation_gap: Option<i64>,
}

/// Result of one case: verdict, optional slack and witness text.
#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub verdict: Verdict,
    pub slack: Option<i64>,
    pub witness: Option<Counterexample>,
}

impl CaseOutcome {
    pub fn pass() -> Self {
        CaseOutcome { verdict: Verdict::Pass, slack: None, witness: None }
    }

    pub fn with_slack(mut self, slack: i64) -> Self {
        self.slack = Some(slack);
        self
    }

    pub fn fail(inputs: impl Into<String>, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        CaseOutcome {
            verdict: Verdict::Fail,
            slack: None,
            witness: Some(Counterexample { inputs: inputs.into(), lhs: lhs.into(), rhs: rhs.into(), valuation_gap: None }),
        }
    }

    pub fn undecided(inputs: impl Into<String>, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        CaseOutcome { verdict: Verdict::Undecided, ..Self::fail(inputs, lhs, rhs) }
    }

    pub fn with_gap(mut self, gap: i64) -> Self {
        if let Some(w) = self.witness.as_mut() {
            w.valuation_gap = Some(gap);
        }
        self
    }

    /// Pass if `ok`, else a failure carrying the given witness.
    pub fn check(ok: bool, inputs: impl FnOnce() -> String, lhs: impl FnOnce() -> String, rhs: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass()
        } else {
            Self::fail(inputs(), lhs(), rhs())
        }
    }
}

/// Counts for one lemma (or one named part of a lemma) on one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub instance: String,
    pub lemma: String,
    pub cases: u64,
    pub passed: u64,
    pub failed: u64,
    pub undecided: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_slack: Option<i64>,
    pub counterexamples: Vec<Counterexample>,
}

/// Witnesses kept per lemma; the first ones in case order.
pub const MAX_COUNTEREXAMPLES: usize = 5;

impl LemmaReport {
    pub fn new(instance: impl Into<String>, lemma: impl Into<String>) -> Self {
        LemmaReport {
            instance: instance.into(),
            lemma: lemma.into(),
            cases: 0,
            passed: 0,
            failed: 0,
            undecided: 0,
            min_slack: None,
            counterexamples: Vec::new(),
        }
    }

    pub fn record(&mut self, outcome: CaseOutcome) {
        self.cases += 1;
        match outcome.verdict {
            Verdict::Pass => self.passed += 1,
            Verdict::Fail => self.failed += 1,
            Verdict::Undecided => self.undecided += 1,
        }
        if let Some(s) = outcome.slack {
            self.min_slack = Some(self.min_slack.map_or(s, |m| m.min(s)));
        }
        if outcome.verdict != Verdict::Pass && self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            if let Some(w) = outcome.witness {
                self.counterexamples.push(w);
            }
        }
    }

    pub fn from_outcomes(instance: impl Into<String>, lemma: impl Into<String>, outcomes: impl IntoIterator<Item = CaseOutcome>) -> Self {
        let mut r = Self::new(instance, lemma);
        for o in outcomes {
            r.record(o);
        }
        r
    }

    /// A report for a single yes/no fact.
    pub fn single(instance: impl Into<String>, lemma: impl Into<String>, outcome: CaseOutcome) -> Self {
        Self::from_outcomes(instance, lemma, [outcome])
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    /// No failures and nothing left undecided.
    pub fn clean(&self) -> bool {
        self.failed == 0 && self.undecided == 0 && self.cases > 0
    }
}

/// Combined counts over several lemma reports.
pub fn totals(reports: &[LemmaReport]) -> (u64, u64, u64, u64) {
    reports.iter().fold((0, 0, 0, 0), |(c, p, f, u), r| (c + r.cases, p + r.passed, f + r.failed, u + r.undecided))
}
