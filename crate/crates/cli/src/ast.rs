//! Abstract syntax of session scripts.
//!
//! A session declares an ambient chart (dimension, variable names, a
//! coefficient-ring tag for monomiality checks), a distribution, named
//! ideals and divisors, and then drives a blowup tower through ordered
//! statements. Parsed statements carry fully resolved payloads (polynomials
//! and derivations are parsed against the variable names in scope at that
//! point), so the runner never re-parses text.

use foliation_core::derivation::Derivation;
use foliation_core::poly::Polynomial;
use std::fmt;

/// Coefficient ring for monomiality verdicts: diagonal weights must lie in
/// the tagged ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingTag {
    Integers,
    Rationals,
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RingTag::Integers => "Z",
            RingTag::Rationals => "Q",
        })
    }
}

/// Whether a linear change is a throwaway view or rewrites the tower state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangeMode {
    View,
    Rebase,
}

impl fmt::Display for ChangeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChangeMode::View => "view",
            ChangeMode::Rebase => "rebase",
        })
    }
}

/// One parsed session statement. Variable-name lists always refer to the
/// chart in scope where the statement appears.
#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Space {
        dimension: usize,
        names: Vec<String>,
        ring: RingTag,
    },
    Distribution {
        name: String,
        generators: Vec<Derivation>,
    },
    IdealDecl {
        name: String,
        generators: Vec<Polynomial>,
    },
    Divisor {
        variable: String,
    },
    CheckAdmissible {
        center: Vec<String>,
    },
    Blowup {
        center: Vec<String>,
        chart: String,
        names: Option<Vec<String>>,
    },
    LinearChange {
        /// Affine-linear expressions of the new coordinates in the old ones.
        map: Vec<Polynomial>,
        names: Vec<String>,
        mode: ChangeMode,
    },
    AssertMonomial {
        of: Option<String>,
        expect: bool,
    },
    AssertInvariant {
        of: String,
        expect: bool,
    },
    AssertUnit {
        of: String,
        expect: bool,
    },
    Chain {
        of: String,
        steps: usize,
    },
    Report,
    SuggestCenter {
        of: String,
    },
}

/// A full session: statements plus the source line each started on.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionScript {
    pub statements: Vec<LocatedStatement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocatedStatement {
    pub statement: Statement,
    pub line: usize,
    /// Variable names in scope when the statement executes (the names of the
    /// chart it operates on), recorded by the parser for canonical printing.
    pub scope_names: Vec<String>,
}

impl SessionScript {
    /// Canonical text of the whole script: one statement per line. Parsing
    /// the printed text yields an equal script.
    pub fn print(&self) -> String {
        let mut out = String::new();
        for located in &self.statements {
            out.push_str(&located.echo());
            out.push('\n');
        }
        out
    }
}

fn quote_join(parts: &[String]) -> String {
    format!("\"{}\"", parts.join(","))
}

impl LocatedStatement {
    /// Canonical single-line form of the statement, with polynomial and
    /// derivation payloads printed in the canonical term order.
    pub fn echo(&self) -> String {
        let names = &self.scope_names;
        match &self.statement {
            Statement::Space {
                dimension,
                names: vars,
                ring,
            } => format!("space {} vars {} ring {}", dimension, vars.join(" "), ring),
            Statement::Distribution { name, generators } => {
                let gens: Vec<String> = generators.iter().map(|g| g.display(names)).collect();
                format!("distribution {} gens \"{}\"", name, gens.join(", "))
            }
            Statement::IdealDecl { name, generators } => {
                let gens: Vec<String> = generators.iter().map(|g| g.display(names)).collect();
                format!("ideal {} gens \"{}\"", name, gens.join(", "))
            }
            Statement::Divisor { variable } => format!("divisor {variable}"),
            Statement::CheckAdmissible { center } => {
                format!("check-admissible center={}", quote_join(center))
            }
            Statement::Blowup {
                center,
                chart,
                names: override_names,
            } => {
                let mut s = format!("blowup center={} chart={}", quote_join(center), chart);
                if let Some(ns) = override_names {
                    s.push_str(&format!(" names={}", quote_join(ns)));
                }
                s
            }
            Statement::LinearChange {
                map,
                names: new_names,
                mode,
            } => {
                let entries: Vec<String> = map.iter().map(|p| p.display(names)).collect();
                format!(
                    "linear-change map=\"{}\" names={} mode={}",
                    entries.join(", "),
                    quote_join(new_names),
                    mode
                )
            }
            Statement::AssertMonomial { of, expect } => {
                let mut s = String::from("assert-monomial");
                if let Some(name) = of {
                    s.push_str(&format!(" of={name}"));
                }
                if !expect {
                    s.push_str(" expect=false");
                }
                s
            }
            Statement::AssertInvariant { of, expect } => {
                let mut s = format!("assert-invariant of={of}");
                if !expect {
                    s.push_str(" expect=false");
                }
                s
            }
            Statement::AssertUnit { of, expect } => {
                let mut s = format!("assert-unit of={of}");
                if !expect {
                    s.push_str(" expect=false");
                }
                s
            }
            Statement::Chain { of, steps } => format!("chain of={of} steps={steps}"),
            Statement::Report => "report".into(),
            Statement::SuggestCenter { of } => format!("suggest-center of={of}"),
        }
    }
}
