//! Machine-readable verification reports.
//!
//! JSON schema:
//!
//! ```text
//! {
//!   "command": "verify denominator",
//!   "params": { "height": "8", "order": "7" },
//!   "status": "pass" | "fail",
//!   "checks": [
//!     { "name": "...", "range": "...", "pass": true,
//!       "first_discrepancy": { "location": "...", "expected": "...", "got": "..." } | null }
//!   ],
//!   "wall_ms": "1234"
//! }
//! ```
//!
//! Every number is an exact decimal string. `params` never records the
//! worker count, so reports do not depend on it.

use std::collections::BTreeMap;
use std::fmt::{self, Display};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub location: String,
    pub expected: String,
    pub got: String,
}

impl Discrepancy {
    pub fn new(location: impl Display, expected: impl Display, got: impl Display) -> Self {
        Discrepancy { location: location.to_string(), expected: expected.to_string(), got: got.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub range: String,
    pub pass: bool,
    pub first_discrepancy: Option<Discrepancy>,
}

impl Check {
    pub fn new(name: impl Into<String>, range: impl Into<String>, first_discrepancy: Option<Discrepancy>) -> Self {
        Check { name: name.into(), range: range.into(), pass: first_discrepancy.is_none(), first_discrepancy }
    }

    /// Passes iff `expected == got`.
    pub fn equal<T: PartialEq + Display>(name: impl Into<String>, range: impl Into<String>, location: impl Display, expected: T, got: T) -> Self {
        let d = (expected != got).then(|| Discrepancy::new(location, expected, got));
        Check::new(name, range, d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub status: String,
    pub checks: Vec<Check>,
    pub wall_ms: String,
}

impl Report {
    pub fn new(command: impl Into<String>, params: BTreeMap<String, String>, checks: Vec<Check>, wall_ms: u128) -> Self {
        let status = if checks.iter().all(|c| c.pass) { "pass" } else { "fail" };
        Report { command: command.into(), params, status: status.into(), checks, wall_ms: wall_ms.to_string() }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// The report with the timing field blanked, for comparisons.
    pub fn without_timing(&self) -> Self {
        Report { wall_ms: String::new(), ..self.clone() }
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.command)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        writeln!(f)?;
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            write!(f, "  {tag}  {} [{}]", c.name, c.range)?;
            if let Some(d) = &c.first_discrepancy {
                write!(f, ": at {} expected {} got {}", d.location, d.expected, d.got)?;
            }
            writeln!(f)?;
        }
        writeln!(f, "status: {} ({} ms)", self.status, self.wall_ms)
    }
}
