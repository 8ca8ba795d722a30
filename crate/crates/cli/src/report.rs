//! Step reports: the machine-readable record each statement produces.
//!
//! Every value is serialized as a canonical string (polynomials and
//! derivations in the canonical term order), and every map is ordered, so a
//! given script always produces byte-identical output.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// The record of one executed statement.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StepReport {
    /// 1-based statement number.
    pub index: usize,
    /// Canonical echo of the statement.
    pub statement: String,
    /// Resolved inputs the statement ran with.
    pub inputs: BTreeMap<String, String>,
    /// Computed results.
    pub outputs: BTreeMap<String, String>,
    /// For checks and asserts: the boolean finding (for asserts, whether the
    /// assertion passed). Declarations and reports carry no verdict.
    pub verdict: Option<bool>,
    /// Semantics notes, e.g. which questions were answered chart-globally.
    pub flags: Vec<String>,
}

impl StepReport {
    pub fn new(index: usize, statement: String) -> Self {
        StepReport {
            index,
            statement,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            verdict: None,
            flags: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn output(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.outputs.insert(key.to_string(), value.into());
        self
    }

    pub fn flag(&mut self, value: impl Into<String>) -> &mut Self {
        let value = value.into();
        if !self.flags.contains(&value) {
            self.flags.push(value);
        }
        self
    }
}

/// Pretty JSON for a full report list (a single top-level list), with a
/// trailing newline.
pub fn to_json(reports: &[StepReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("report serialization cannot fail");
    s.push('\n');
    s
}

/// Human-readable rendering of a full report list.
pub fn to_text(reports: &[StepReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "[{:>2}] {}", r.index, r.statement);
        for (k, v) in &r.inputs {
            let _ = writeln!(out, "     in  {k}: {v}");
        }
        for (k, v) in &r.outputs {
            let _ = writeln!(out, "     out {k}: {v}");
        }
        if let Some(v) = r.verdict {
            let _ = writeln!(out, "     verdict: {v}");
        }
        if !r.flags.is_empty() {
            let _ = writeln!(out, "     flags: {}", r.flags.join("; "));
        }
    }
    out
}
