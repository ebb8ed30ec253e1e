//! Structured verification reports shared by the library and the CLI.

use serde::Serialize;

/// Outcome of one named check, with a human-readable witness.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A bundle of checks for one subject (a block or a dual pair).
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub subject: String,
    pub suite: String,
    pub max_degree: usize,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn new(subject: &str, suite: &str, max_degree: usize) -> VerifyReport {
        VerifyReport {
            subject: subject.to_string(),
            suite: suite.to_string(),
            max_degree,
            checks: Vec::new(),
            passed: true,
        }
    }

    /// Record a check: `Ok(detail)` passes, `Err` fails with the error text
    /// as witness.
    pub fn record(&mut self, name: &str, outcome: crate::Result<String>) {
        match outcome {
            Ok(detail) => self.checks.push(CheckResult {
                name: name.to_string(),
                passed: true,
                detail,
            }),
            Err(e) => {
                self.passed = false;
                self.checks.push(CheckResult {
                    name: name.to_string(),
                    passed: false,
                    detail: e.to_string(),
                });
            }
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "verify {} (suite {}, max degree {})\n",
            self.subject, self.suite, self.max_degree
        );
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {}: {}\n",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out.push_str(if self.passed { "PASSED\n" } else { "FAILED\n" });
        out
    }
}
