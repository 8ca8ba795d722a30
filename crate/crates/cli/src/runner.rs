//! Executes a parsed session against a blowup tower.
//!
//! Statements run in order; the first failing operation stops the session
//! with a diagnostic report entry. Assert statements compare their finding
//! with the expected value and drive the process exit code; checks and
//! declarations only record what they computed.

use crate::ast::{ChangeMode, LocatedStatement, RingTag, SessionScript, Statement};
use crate::parser::SessionError;
use crate::report::StepReport;
use crate::suggest::suggest_center;
use foliation_core::admissibility::{admissibility_report, AdmissibilityReport};
use foliation_core::derivation::{
    classify_elementary, monomialize_linear, CoordinateChange, Derivation, Distribution,
    ElementaryKind,
};
use foliation_core::fitting::{is_invariant, regular_at, tangency_chain, tg_invariant_at_point};
use foliation_core::ideal::Ideal;
use foliation_core::poly::{Point, Polynomial, Q};
use foliation_core::tower::{CenterCertificate, ChangeView, DivisorOrigin, FoliatedChart, Tower};
use foliation_core::EngineError;
use num::{One, Zero};

/// Everything a finished (or stopped) session leaves behind.
#[derive(Debug)]
pub struct SessionOutcome {
    pub reports: Vec<StepReport>,
    /// True when every assert statement matched its expected value.
    pub asserts_passed: bool,
    /// The first hard error, if the session stopped early.
    pub error: Option<SessionError>,
    /// Final tower state (present once any tower statement ran).
    pub tower: Option<Tower>,
    /// Coordinate views produced by `linear-change mode=view`, in order.
    pub views: Vec<ChangeView>,
    pub ring: Option<RingTag>,
}

struct Runner {
    ring: Option<RingTag>,
    ground_names: Vec<String>,
    distribution: Option<(String, Vec<Derivation>)>,
    pending_ideals: Vec<(String, Vec<Polynomial>)>,
    divisors: Vec<usize>,
    tower: Option<Tower>,
    views: Vec<ChangeView>,
    asserts_passed: bool,
}

fn runtime_error(line: usize, e: EngineError) -> SessionError {
    SessionError {
        line,
        column: 1,
        message: e.to_string(),
    }
}

impl Runner {
    fn tower(&mut self, line: usize) -> Result<&mut Tower, SessionError> {
        if self.tower.is_none() {
            let (_, gens) = self
                .distribution
                .clone()
                .expect("parser guarantees a distribution before tower statements");
            let leaf_dimension = gens.len();
            let dist = Distribution::new(gens, leaf_dimension)
                .map_err(|e| runtime_error(line, e))?;
            let mut chart = FoliatedChart::new(self.ground_names.clone(), dist, &self.divisors)
                .map_err(|e| runtime_error(line, e))?;
            let n = chart.nvars();
            for (name, gens) in self.pending_ideals.drain(..) {
                let ideal = Ideal::new(n, gens).map_err(|e| runtime_error(line, e))?;
                chart
                    .insert_ideal(name, ideal)
                    .map_err(|e| runtime_error(line, e))?;
            }
            self.tower = Some(Tower::new(chart));
        }
        Ok(self.tower.as_mut().expect("just ensured"))
    }

    fn current_ideal(&mut self, name: &str, line: usize) -> Result<Ideal, SessionError> {
        let tower = self.tower(line)?;
        tower
            .current()
            .ideal(name)
            .cloned()
            .ok_or_else(|| SessionError {
                line,
                column: 1,
                message: format!("ideal '{name}' is not present in the current chart"),
            })
    }

    fn variable_indices(
        &mut self,
        names: &[String],
        line: usize,
    ) -> Result<Vec<usize>, SessionError> {
        let tower = self.tower(line)?;
        let chart = tower.current();
        names
            .iter()
            .map(|n| {
                chart.variable_index(n).ok_or_else(|| SessionError {
                    line,
                    column: 1,
                    message: format!("variable '{n}' is not a coordinate of the current chart"),
                })
            })
            .collect()
    }
}

fn center_display(names: &[String]) -> String {
    format!("V({})", names.join(", "))
}

fn render_weights(weights: &[Q]) -> String {
    let parts: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Writes the per-size minor records of an admissibility report.
fn admissibility_outputs(report: &AdmissibilityReport, names: &[String], step: &mut StepReport) {
    step.output("admissible", report.is_admissible().to_string());
    step.output("d0", report.d0().to_string());
    for record in report.records() {
        step.output(
            &format!("minors k={}", record.k()),
            format!("{} ({})", record.minors().display(names), record.relation()),
        );
    }
    if let Some(witness) = report.witness() {
        step.output("witness minor", witness.display(names));
    }
}

/// The affine expression of each new coordinate in the old ones:
/// `new_k = sum_i S[k][i] (x_i - p_i)`.
fn change_substitution(change: &CoordinateChange, n: usize) -> Vec<Polynomial> {
    let rows = change.matrix_rows();
    let p = change.translation();
    (0..n)
        .map(|k| {
            let mut entry = Polynomial::zero(n);
            for i in 0..n {
                if rows[k][i].is_zero() {
                    continue;
                }
                let shifted = &Polynomial::var(n, i).expect("index in range")
                    - &Polynomial::constant(n, p[i].clone());
                entry = &entry + &shifted.scale(&rows[k][i]);
            }
            entry
        })
        .collect()
}

/// Builds the affine change `new = S(x - p)` whose coordinate expressions
/// are the given affine-linear map entries.
fn change_from_map(map: &[Polynomial], line: usize) -> Result<CoordinateChange, SessionError> {
    let n = map.len();
    let mut rows = Vec::with_capacity(n);
    let mut consts = Vec::with_capacity(n);
    for entry in map {
        let (c, linear, higher) = entry.linear_decomposition();
        if higher {
            return Err(SessionError {
                line,
                column: 1,
                message: "change map entries must be affine-linear".into(),
            });
        }
        rows.push(linear);
        consts.push(c);
    }
    // new = S x + c = S(x - p) with p = S^{-1}(-c).
    let linear_part = CoordinateChange::new(rows.clone(), vec![Q::zero(); n])
        .map_err(|e| runtime_error(line, e))?;
    let sinv = linear_part.inverse_change().matrix_rows();
    let p: Vec<Q> = (0..n)
        .map(|i| {
            let mut acc = Q::zero();
            for (j, c) in consts.iter().enumerate() {
                acc += sinv[i][j].clone() * -c.clone();
            }
            acc
        })
        .collect();
    CoordinateChange::new(rows, p).map_err(|e| runtime_error(line, e))
}

fn chart_snapshot(tower: &Tower, dist_name: &str, step: &mut StepReport) {
    let chart = tower.current();
    let names = chart.names().to_vec();
    step.output("variables", names.join(", "));
    let gens: Vec<String> = chart
        .theta()
        .generators()
        .iter()
        .map(|g| g.display(&names))
        .collect();
    step.output(&format!("distribution {dist_name}"), gens.join(", "));
    for (name, ideal) in chart.ideals() {
        step.output(&format!("ideal {name}"), ideal.display(&names));
    }
    for record in chart.ledger().records() {
        let label = match record.origin() {
            DivisorOrigin::Initial(i) => format!("divisor initial {i}"),
            DivisorOrigin::ExceptionalOfStep(s) => format!("divisor exceptional of step {s}"),
        };
        let value = match record.variable() {
            Some(v) => format!("V({})", names[v]),
            None => "not visible in this chart".to_string(),
        };
        step.output(&label, value);
    }
    for (i, m) in chart.exceptional_monomials().iter().enumerate() {
        let poly = Polynomial::from_term(chart.nvars(), m.clone(), Q::one());
        step.output(&format!("exceptional equation of step {}", i + 1), poly.display(&names));
    }
}

/// Runs a parsed script to completion or its first hard error.
pub fn run_session(script: &SessionScript) -> SessionOutcome {
    let mut runner = Runner {
        ring: None,
        ground_names: Vec::new(),
        distribution: None,
        pending_ideals: Vec::new(),
        divisors: Vec::new(),
        tower: None,
        views: Vec::new(),
        asserts_passed: true,
    };
    let mut reports = Vec::new();
    let mut error = None;

    for (i, located) in script.statements.iter().enumerate() {
        let mut step = StepReport::new(i + 1, located.echo());
        match execute(&mut runner, located, &mut step) {
            Ok(()) => reports.push(step),
            Err(e) => {
                step.flag("error");
                step.output("error", e.to_string());
                reports.push(step);
                error = Some(e);
                break;
            }
        }
    }

    SessionOutcome {
        reports,
        asserts_passed: runner.asserts_passed,
        error,
        tower: runner.tower,
        views: runner.views,
        ring: runner.ring,
    }
}

fn execute(
    runner: &mut Runner,
    located: &LocatedStatement,
    step: &mut StepReport,
) -> Result<(), SessionError> {
    let line = located.line;
    match &located.statement {
        Statement::Space {
            dimension,
            names,
            ring,
        } => {
            runner.ring = Some(*ring);
            runner.ground_names = names.clone();
            step.output("dimension", dimension.to_string());
            step.output("variables", names.join(", "));
            step.output("ring", ring.to_string());
        }
        Statement::Distribution { name, generators } => {
            runner.distribution = Some((name.clone(), generators.clone()));
            let gens: Vec<String> = generators
                .iter()
                .map(|g| g.display(&located.scope_names))
                .collect();
            step.output("declared", name.clone());
            step.output("generators", gens.join(", "));
        }
        Statement::IdealDecl { name, generators } => {
            let rendered = Ideal::new(located.scope_names.len(), generators.clone())
                .map_err(|e| runtime_error(line, e))?;
            step.output("declared", name.clone());
            step.output("generators", rendered.display(&located.scope_names));
            match runner.tower.as_mut() {
                Some(tower) => {
                    tower
                        .current_mut()
                        .insert_ideal(name.clone(), rendered)
                        .map_err(|e| runtime_error(line, e))?;
                }
                None => runner.pending_ideals.push((name.clone(), generators.clone())),
            }
        }
        Statement::Divisor { variable } => {
            let index = runner
                .ground_names
                .iter()
                .position(|n| n == variable)
                .expect("parser validated the divisor variable");
            runner.divisors.push(index);
            step.output("divisor", format!("V({variable})"));
        }
        Statement::CheckAdmissible { center } => {
            let center_idx = runner.variable_indices(center, line)?;
            let tower = runner.tower(line)?;
            let chart = tower.current();
            let names = chart.names().to_vec();
            let center_gens = center_idx
                .iter()
                .map(|&v| Polynomial::var(chart.nvars(), v))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| runtime_error(line, e))?;
            let center_ideal =
                Ideal::new(chart.nvars(), center_gens).map_err(|e| runtime_error(line, e))?;
            let report = admissibility_report(chart.theta(), &center_ideal)
                .map_err(|e| runtime_error(line, e))?;
            step.input("center", center_display(center));
            admissibility_outputs(&report, &names, step);
            step.verdict = Some(report.is_admissible());
            step.flag("chart-global");
        }
        Statement::Blowup {
            center,
            chart,
            names: override_names,
        } => {
            let center_idx = runner.variable_indices(center, line)?;
            let chart_idx = runner.variable_indices(std::slice::from_ref(chart), line)?[0];
            let tower = runner.tower(line)?;
            let old_names = tower.current().names().to_vec();
            step.input("center", center_display(center));
            step.input("chart", chart.clone());
            let outcome = tower
                .apply_blowup(&center_idx, chart_idx, override_names.clone())
                .map_err(|e| runtime_error(line, e))?;
            let new_names = tower.current().names().to_vec();
            admissibility_outputs(outcome.admissibility(), &old_names, step);
            let certificate = match outcome.certificate() {
                CenterCertificate::Invariant => "invariant center; analytic pullbacks".to_string(),
                CenterCertificate::Transverse(m) => {
                    format!("transverse split; {m} exceptional-scaled generator(s)")
                }
                CenterCertificate::Candidate { syzygy_fields } => {
                    format!("no certificate; candidate module with {syzygy_fields} syzygy field(s)")
                }
            };
            step.output("certificate", certificate);
            step.output("chart variables", new_names.join(", "));
            let theta: Vec<String> = tower
                .current()
                .theta()
                .generators()
                .iter()
                .map(|g| g.display(&new_names))
                .collect();
            step.output("transformed distribution", theta.join(", "));
            for (name, label) in outcome.labels() {
                step.output(&format!("ideal {name} transform"), label.to_string());
                let moved = tower.current().ideal(name).expect("ideal moved with the tower");
                step.output(&format!("ideal {name}"), moved.display(&new_names));
            }
            for (name, total) in outcome.totals() {
                step.output(&format!("ideal {name} total transform"), total.display(&new_names));
            }
            step.verdict = Some(outcome.certificate().is_certified());
            step.flag("chart-global");
            if !outcome.certificate().is_certified() {
                step.flag("strict transform: candidate module (no certificate)");
            }
        }
        Statement::LinearChange { map, names, mode } => {
            let change = change_from_map(map, line)?;
            let entries: Vec<String> = map
                .iter()
                .map(|p| p.display(&located.scope_names))
                .collect();
            step.input("map", entries.join(", "));
            step.input("mode", mode.to_string());
            let tower = runner.tower(line)?;
            match mode {
                ChangeMode::View => {
                    let view = tower
                        .change_view(&change, names.clone())
                        .map_err(|e| runtime_error(line, e))?;
                    step.output("variables", view.names().join(", "));
                    let gens: Vec<String> =
                        view.theta().iter().map(|g| g.display(view.names())).collect();
                    step.output("distribution", gens.join(", "));
                    for (name, ideal) in view.ideals() {
                        step.output(&format!("ideal {name}"), ideal.display(view.names()));
                    }
                    step.flag("view only; tower unchanged");
                    runner.views.push(view);
                }
                ChangeMode::Rebase => {
                    tower
                        .apply_rebase(&change, names.clone())
                        .map_err(|e| runtime_error(line, e))?;
                    let dist_name = runner
                        .distribution
                        .as_ref()
                        .map(|(n, _)| n.clone())
                        .unwrap_or_default();
                    let tower = runner.tower(line)?;
                    chart_snapshot(tower, &dist_name, step);
                }
            }
        }
        Statement::AssertMonomial { of: _, expect } => {
            let ring = runner.ring.expect("parser guarantees a space statement");
            let tower = runner.tower(line)?;
            let chart = tower.current();
            let names = chart.names().to_vec();
            let n = chart.nvars();
            let origin = Point::origin(n);
            let finding = if regular_at(chart.theta(), &origin).map_err(|e| runtime_error(line, e))? {
                step.output(
                    "regularity",
                    "distribution regular at the chart origin; flow-box coordinates exist",
                );
                step.flag("regular point: flow-box");
                true
            } else {
                match monomialize_linear(chart.theta().generators()) {
                    Ok(outcome) => {
                        let aligned_names: Vec<String> =
                            (1..=n).map(|k| format!("u{k}")).collect();
                        if !outcome.already_normal {
                            for (k, entry) in
                                change_substitution(&outcome.change, n).iter().enumerate()
                            {
                                step.output(
                                    &format!("substitution u{}", k + 1),
                                    entry.display(&names),
                                );
                            }
                        }
                        let mut in_ring = true;
                        for (k, g) in outcome.transformed.iter().enumerate() {
                            let display_names = if outcome.already_normal {
                                &names
                            } else {
                                &aligned_names
                            };
                            let class = match classify_elementary(g) {
                                Some(ElementaryKind::Zero) => "zero".to_string(),
                                Some(ElementaryKind::Partial { var, scale }) => {
                                    format!("partial in {} (scale {})", display_names[var], scale)
                                }
                                Some(ElementaryKind::Diagonal { weights }) => {
                                    if ring == RingTag::Integers
                                        && weights.iter().any(|w| !w.is_integer())
                                    {
                                        in_ring = false;
                                        step.flag("weights outside ring");
                                    }
                                    format!("diagonal with weights {}", render_weights(&weights))
                                }
                                None => {
                                    in_ring = false;
                                    "unclassified".to_string()
                                }
                            };
                            step.output(
                                &format!("aligned generator {}", k + 1),
                                format!("{} ({class})", g.display(display_names)),
                            );
                        }
                        in_ring
                    }
                    Err(obstruction) => {
                        step.output("obstruction", obstruction.to_string());
                        step.flag("linear-monomializable: inconclusive");
                        false
                    }
                }
            };
            step.output("monomial", finding.to_string());
            step.input("expect", expect.to_string());
            let passed = finding == *expect;
            step.verdict = Some(passed);
            if !passed {
                runner.asserts_passed = false;
            }
        }
        Statement::AssertInvariant { of, expect } => {
            let ideal = runner.current_ideal(of, line)?;
            let tower = runner.tower(line)?;
            let finding = is_invariant(tower.current().theta().generators(), &ideal)
                .map_err(|e| runtime_error(line, e))?;
            step.input("ideal", of.clone());
            step.input("expect", expect.to_string());
            step.output("invariant", finding.to_string());
            step.flag("chart-global");
            let passed = finding == *expect;
            step.verdict = Some(passed);
            if !passed {
                runner.asserts_passed = false;
            }
        }
        Statement::AssertUnit { of, expect } => {
            let ideal = runner.current_ideal(of, line)?;
            let finding = ideal.is_unit_ideal();
            step.input("ideal", of.clone());
            step.input("expect", expect.to_string());
            step.output("unit ideal", finding.to_string());
            let passed = finding == *expect;
            step.verdict = Some(passed);
            if !passed {
                runner.asserts_passed = false;
            }
        }
        Statement::Chain { of, steps } => {
            let ideal = runner.current_ideal(of, line)?;
            let tower = runner.tower(line)?;
            let chart = tower.current();
            let names = chart.names().to_vec();
            step.input("ideal", of.clone());
            step.input("steps", steps.to_string());
            let chain = tangency_chain(chart.theta().generators(), &ideal, *steps)
                .map_err(|e| runtime_error(line, e))?;
            for (i, h) in chain.ideals().iter().enumerate() {
                step.output(&format!("chain ideal {i}"), h.display(&names));
            }
            step.output("stabilized", chain.is_stabilized().to_string());
            if chain.is_stabilized() {
                step.output("stabilization index", chain.stabilization_index().to_string());
                let inv = tg_invariant_at_point(&chain, &Point::origin(chart.nvars()))
                    .map_err(|e| runtime_error(line, e))?;
                step.output("origin invariant", inv.to_string());
            }
            step.flag("chart-global");
        }
        Statement::Report => {
            let dist_name = runner
                .distribution
                .as_ref()
                .map(|(n, _)| n.clone())
                .unwrap_or_default();
            let tower = runner.tower(line)?;
            chart_snapshot(tower, &dist_name, step);
        }
        Statement::SuggestCenter { of } => {
            let ideal = runner.current_ideal(of, line)?;
            let tower = runner.tower(line)?;
            let chart = tower.current();
            step.input("ideal", of.clone());
            let suggestion =
                suggest_center(chart.theta(), &ideal).map_err(|e| runtime_error(line, e))?;
            match suggestion {
                Some(vars) => {
                    let names: Vec<String> =
                        vars.iter().map(|&v| chart.names()[v].clone()).collect();
                    step.output("center", center_display(&names));
                }
                None => {
                    step.output("center", "no suggestion");
                }
            }
            step.flag("monomial-support heuristic");
        }
    }
    Ok(())
}
