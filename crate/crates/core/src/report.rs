//! Check records and their JSON/text rendering. Every numeric field is a
//! decimal string.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::numeric::float_string;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Truncation saturated before the tolerance could be certified.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub computed: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference: Option<String>,
    pub abs_error: String,
    pub tolerance: String,
    pub status: Status,
}

impl Record {
    /// Status is `Pass` exactly when `abs_error < tolerance`.
    pub fn new(name: impl Into<String>, computed: Vec<String>, reference: Option<String>, abs_error: &Float, tolerance: &Float) -> Self {
        let status = if abs_error.is_finite() && abs_error < tolerance { Status::Pass } else { Status::Fail };
        Record { name: name.into(), computed, reference, abs_error: short_float(abs_error), tolerance: short_float(tolerance), status }
    }

    pub fn indeterminate(mut self) -> Self {
        if self.status == Status::Fail {
            self.status = Status::Indeterminate;
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Six significant digits, scientific notation.
pub fn short_float(x: &Float) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else { "inf".into() };
    }
    float_string(x, 6)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub records: Vec<Record>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, records: Vec<Record>) -> Self {
        let status = combine(records.iter().map(|r| r.status));
        CheckReport { name: name.into(), status, records, notes: Vec::new() }
    }

    pub fn failed(name: impl Into<String>, note: impl Into<String>) -> Self {
        CheckReport { name: name.into(), status: Status::Fail, records: Vec::new(), notes: vec![note.into()] }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

fn combine(it: impl Iterator<Item = Status>) -> Status {
    let mut out = Status::Pass;
    for s in it {
        match s {
            Status::Fail => return Status::Fail,
            Status::Indeterminate => out = Status::Indeterminate,
            Status::Pass => {}
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Environment {
    pub precision_digits: u32,
    pub guard_digits: u32,
    pub achieved_digits: u32,
    pub factors_used: String,
    pub max_tail_bound: String,
    pub saturated: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub status: Status,
    pub checks: Vec<CheckReport>,
    pub environment: Environment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl Report {
    pub fn new(name: impl Into<String>, checks: Vec<CheckReport>, environment: Environment) -> Self {
        let status = combine(checks.iter().map(|c| c.status));
        Report { name: name.into(), status, checks, environment }
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Text => self.text(),
        }
    }

    fn text(&self) -> String {
        let mark = |s: Status| match s {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Indeterminate => "INDETERMINATE",
        };
        let mut out = String::new();
        for c in &self.checks {
            for r in &c.records {
                out += &format!(
                    "[{}] {}/{}: computed {} ref {} err {} tol {}\n",
                    mark(r.status),
                    c.name,
                    r.name,
                    r.computed.join(", "),
                    r.reference.as_deref().unwrap_or("-"),
                    r.abs_error,
                    r.tolerance
                );
            }
            for n in &c.notes {
                out += &format!("[{}] {}: {}\n", mark(c.status), c.name, n);
            }
        }
        let e = &self.environment;
        out += &format!(
            "{}: {} (precision {} digits, achieved {}, factors {}, tail {}{})\n",
            self.name,
            mark(self.status),
            e.precision_digits,
            e.achieved_digits,
            e.factors_used,
            e.max_tail_bound,
            if e.saturated { ", saturated" } else { "" }
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_text_lines() {
        let t = Float::with_val(64, 1e-10);
        let r1 = Record::new("a", vec!["1.0".into()], Some("1.0".into()), &Float::with_val(64, 1e-12), &t);
        let r2 = Record::new("b", vec!["2.0".into()], None, &Float::with_val(64, 1e-3), &t).indeterminate();
        assert!(r1.passed());
        assert_eq!(r2.status, Status::Indeterminate);
        let rep = Report::new("x", vec![CheckReport::new("gamma", vec![r1, r2])], Environment::default());
        assert_eq!(rep.status, Status::Indeterminate);
        let js = rep.emit(Format::Json);
        let back: Report = serde_json::from_str(&js).unwrap();
        assert_eq!(back, rep);
        let text = rep.emit(Format::Text);
        assert_eq!(text.lines().count(), 3);
    }
}
