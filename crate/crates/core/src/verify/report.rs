use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    /// The check could not be evaluated (bad expression, insufficient
    /// order, non-invertible constant term). Distinct from `Fail`.
    Error,
}

/// The first coefficient where the two sides disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub index: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub status: Status,
    /// Highest coefficient index (identities) or progression index
    /// (congruences) covered by the check.
    pub checked_through: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn pass(name: &str, checked_through: usize, elapsed: Duration) -> Self {
        VerificationReport {
            name: name.to_string(),
            status: Status::Pass,
            checked_through,
            first_failure: None,
            error: None,
            detail: None,
            elapsed_ms: elapsed.as_millis() as u64,
        }
    }

    pub fn fail(name: &str, checked_through: usize, witness: Witness, elapsed: Duration) -> Self {
        VerificationReport {
            status: Status::Fail,
            first_failure: Some(witness),
            ..VerificationReport::pass(name, checked_through, elapsed)
        }
    }

    pub fn error(name: &str, message: String, elapsed: Duration) -> Self {
        VerificationReport {
            status: Status::Error,
            error: Some(message),
            ..VerificationReport::pass(name, 0, elapsed)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// The parameters a run was made with, embedded in every report so a run
/// can be reproduced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunParameters {
    pub profile: String,
    pub jobs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ledger_path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub engine_version: String,
    pub ledger_hash: String,
    pub parameters: RunParameters,
    pub reports: Vec<VerificationReport>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(VerificationReport::passed)
    }

    pub fn any_error(&self) -> bool {
        self.reports.iter().any(|r| r.status == Status::Error)
    }
}

/// Plain-text table, one row per report.
pub fn render_table(reports: &[VerificationReport]) -> String {
    let name_w = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_w$}  {:<6}  {:>8}  {:>9}  note",
        "name", "status", "through", "ms"
    );
    for r in reports {
        let status = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let note = match (&r.first_failure, &r.error, &r.detail) {
            (Some(w), _, _) => format!("first mismatch at {}: {} vs {}", w.index, w.lhs, w.rhs),
            (_, Some(e), _) => e.clone(),
            (_, _, Some(d)) => d.clone(),
            _ => String::new(),
        };
        let _ = writeln!(
            out,
            "{:<name_w$}  {:<6}  {:>8}  {:>9}  {}",
            r.name, status, r.checked_through, r.elapsed_ms, note
        );
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let _ = writeln!(out, "{passed}/{} passed", reports.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_byte_identical() {
        let report = RunReport {
            engine_version: "qphi-0.1.0".into(),
            ledger_hash: "ab".into(),
            parameters: RunParameters {
                profile: "quick".into(),
                jobs: 2,
                terms: None,
                entries: vec![],
                ledger_path: None,
            },
            reports: vec![
                VerificationReport::pass("a", 10, Duration::from_millis(3)),
                VerificationReport::fail(
                    "b",
                    4,
                    Witness {
                        index: 4,
                        lhs: "1234567890123456789012345".into(),
                        rhs: "0".into(),
                    },
                    Duration::ZERO,
                ),
                VerificationReport::error("c", "boom".into(), Duration::ZERO),
            ],
        };
        let text = report.to_json();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json(), text);
        assert!(!report.all_passed());
        assert!(report.any_error());
    }

    #[test]
    fn table_mentions_witness() {
        let r = VerificationReport::fail(
            "x",
            9,
            Witness {
                index: 7,
                lhs: "3".into(),
                rhs: "4".into(),
            },
            Duration::ZERO,
        );
        let t = render_table(&[r]);
        assert!(t.contains("FAIL"));
        assert!(t.contains("first mismatch at 7: 3 vs 4"));
        assert!(t.contains("0/1 passed"));
    }
}
