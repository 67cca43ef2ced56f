//! Machine-readable results of the verification suites.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Acceptance rule applied to a statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Threshold {
    /// `value < bound`
    Below { bound: f64 },
    /// `value ≤ bound`
    AtMost { bound: f64 },
    /// `value > bound`
    Above { bound: f64 },
    /// `lo ≤ value ≤ hi`
    Within { lo: f64, hi: f64 },
    /// `|value - target| ≤ tol`
    Near { target: f64, tol: f64 },
    /// Recorded for information only.
    Info,
}

impl Threshold {
    pub fn accepts(&self, v: f64) -> bool {
        match *self {
            Threshold::Below { bound } => v < bound,
            Threshold::AtMost { bound } => v <= bound,
            Threshold::Above { bound } => v > bound,
            Threshold::Within { lo, hi } => lo <= v && v <= hi,
            Threshold::Near { target, tol } => (v - target).abs() <= tol,
            Threshold::Info => true,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Threshold::Below { bound } => write!(f, "< {bound}"),
            Threshold::AtMost { bound } => write!(f, "<= {bound}"),
            Threshold::Above { bound } => write!(f, "> {bound}"),
            Threshold::Within { lo, hi } => write!(f, "in [{lo}, {hi}]"),
            Threshold::Near { target, tol } => write!(f, "= {target} ± {tol}"),
            Threshold::Info => write!(f, "(info)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotRun,
}

/// `Criterion` reports decide the exit code; `Diagnostic` ones carry
/// supporting measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    Criterion,
    Diagnostic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub suite: String,
    pub criterion: u32,
    pub name: String,
    pub kind: ReportKind,
    pub value: f64,
    pub threshold: Threshold,
    pub status: Status,
    pub sample_sizes: Vec<usize>,
    pub runtime_s: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl StatReport {
    pub fn new(
        suite: &str,
        criterion: u32,
        name: impl Into<String>,
        value: f64,
        threshold: Threshold,
        sample_sizes: Vec<usize>,
    ) -> Self {
        let status = if threshold.accepts(value) {
            Status::Pass
        } else {
            Status::Fail
        };
        StatReport {
            suite: suite.into(),
            criterion,
            name: name.into(),
            kind: ReportKind::Criterion,
            value,
            threshold,
            status,
            sample_sizes,
            runtime_s: 0.0,
            note: String::new(),
        }
    }

    pub fn diagnostic(mut self) -> Self {
        self.kind = ReportKind::Diagnostic;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn not_run(
        suite: &str,
        criterion: u32,
        name: impl Into<String>,
        reason: impl Into<String>,
    ) -> Self {
        StatReport {
            suite: suite.into(),
            criterion,
            name: name.into(),
            kind: ReportKind::Criterion,
            value: f64::NAN,
            threshold: Threshold::Info,
            status: Status::NotRun,
            sample_sizes: Vec::new(),
            runtime_s: 0.0,
            note: reason.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One-line summary, `PASS`/`FAIL`/`NOT-RUN` first.
    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotRun => "NOT-RUN",
        };
        let kind = if self.kind == ReportKind::Diagnostic {
            " [diagnostic]"
        } else {
            ""
        };
        let mut s = format!(
            "{tag} C{} {}{kind}: {:.6} {}",
            self.criterion, self.name, self.value, self.threshold
        );
        if !self.note.is_empty() {
            s.push_str(&format!(" ({})", self.note));
        }
        s
    }
}

/// `true` unless some criterion report failed or did not run.
pub fn all_passed(reports: &[StatReport]) -> bool {
    reports
        .iter()
        .filter(|r| r.kind == ReportKind::Criterion)
        .all(StatReport::passed)
}

/// `summary.json` contents.
pub fn summary_json(reports: &[StatReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_threshold() {
        let r = StatReport::new("s", 1, "x", 0.5, Threshold::Below { bound: 0.5 }, vec![]);
        assert_eq!(r.status, Status::Fail);
        let r = StatReport::new("s", 1, "x", 0.5, Threshold::AtMost { bound: 0.5 }, vec![]);
        assert!(r.passed());
        assert!(Threshold::Near {
            target: 1.0,
            tol: 0.1
        }
        .accepts(1.1 - 1e-12));
        assert!(!Threshold::Within { lo: 0.0, hi: 1.0 }.accepts(f64::NAN));
    }

    #[test]
    fn diagnostics_do_not_decide() {
        let bad =
            StatReport::new("s", 2, "d", 3.0, Threshold::Below { bound: 1.0 }, vec![]).diagnostic();
        let good = StatReport::new("s", 2, "c", 0.0, Threshold::Below { bound: 1.0 }, vec![]);
        assert!(all_passed(&[bad.clone(), good.clone()]));
        assert!(!all_passed(&[
            good,
            StatReport::not_run("s", 3, "n", "skipped")
        ]));
        assert!(bad.line().starts_with("FAIL C2 d [diagnostic]"));
    }

    #[test]
    fn json_round_trip() {
        let r = vec![StatReport::new(
            "s",
            1,
            "x",
            0.25,
            Threshold::Within { lo: 0.0, hi: 1.0 },
            vec![3, 4],
        )];
        let back: Vec<StatReport> = serde_json::from_str(&summary_json(&r)).unwrap();
        assert_eq!(back, r);
    }
}
