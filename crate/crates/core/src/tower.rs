//! Towers of blowup charts: named coordinates, a divisor ledger, transforms
//! of the carried distribution and ideals at each step, and the
//! exceptional-monomial bookkeeping behind the step-product sheaf.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::admissibility::{admissibility_report, transverse_split, AdmissibilityReport};
use crate::blowup::{
    adapted_strict_transform, blowup_chart, controlled_transform_ideal, pullback_derivation,
    strict_closure_syzygies, total_transform_ideal, BlowupCenter, CenterKind, ChartMap,
};
use crate::derivation::{CoordinateChange, Derivation, Distribution};
use crate::error::EngineError;
use crate::ideal::Ideal;
use crate::monomial::Monomial;
use crate::poly::{Polynomial, Q};

/// Where a tracked divisor came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisorOrigin {
    /// Strict transform of the i-th initially declared divisor.
    Initial(usize),
    /// Exceptional divisor created by blowup step k (1-based).
    ExceptionalOfStep(usize),
}

/// One tracked divisor: its origin and, when it is a coordinate hyperplane
/// meeting the current chart, its defining variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorRecord {
    origin: DivisorOrigin,
    variable: Option<usize>,
}

impl DivisorRecord {
    pub fn origin(&self) -> DivisorOrigin {
        self.origin
    }

    /// Defining variable in the current chart; `None` when the strict
    /// transform misses the chart or is no longer a coordinate hyperplane.
    pub fn variable(&self) -> Option<usize> {
        self.variable
    }
}

/// Ordered list of tracked divisors, preserved across steps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DivisorLedger {
    records: Vec<DivisorRecord>,
}

impl DivisorLedger {
    pub fn records(&self) -> &[DivisorRecord] {
        &self.records
    }

    /// Variables of the divisors that meet the current chart.
    pub fn visible_variables(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = self.records.iter().filter_map(|r| r.variable).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }
}

/// One affine chart of the tower: variable names, the carried distribution,
/// named ideals, the divisor ledger, and the per-step exceptional equations
/// pushed forward into this chart.
#[derive(Debug, Clone)]
pub struct FoliatedChart {
    names: Vec<String>,
    theta: Distribution,
    ideals: BTreeMap<String, Ideal>,
    ledger: DivisorLedger,
    exceptional_monomials: Vec<Monomial>,
}

impl FoliatedChart {
    /// Builds the ground chart; `divisor_variables` lists the initially
    /// present divisors as coordinate hyperplanes.
    pub fn new(
        names: Vec<String>,
        theta: Distribution,
        divisor_variables: &[usize],
    ) -> Result<Self, EngineError> {
        let n = theta.nvars();
        if names.len() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: names.len(),
            });
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(EngineError::Precondition(format!("variable {i} has an empty name")));
            }
            if names[..i].contains(name) {
                return Err(EngineError::Precondition(format!(
                    "duplicate variable name '{name}'"
                )));
            }
        }
        let mut records = Vec::new();
        for (i, &v) in divisor_variables.iter().enumerate() {
            if v >= n {
                return Err(EngineError::IndexOutOfRange { index: v, nvars: n });
            }
            records.push(DivisorRecord {
                origin: DivisorOrigin::Initial(i),
                variable: Some(v),
            });
        }
        Ok(FoliatedChart {
            names,
            theta,
            ideals: BTreeMap::new(),
            ledger: DivisorLedger { records },
            exceptional_monomials: Vec::new(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.theta.nvars()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn theta(&self) -> &Distribution {
        &self.theta
    }

    pub fn ideals(&self) -> &BTreeMap<String, Ideal> {
        &self.ideals
    }

    pub fn ideal(&self, name: &str) -> Option<&Ideal> {
        self.ideals.get(name)
    }

    pub fn ledger(&self) -> &DivisorLedger {
        &self.ledger
    }

    /// Exceptional equation of each completed blowup step, pushed forward
    /// through all later substitutions into this chart.
    pub fn exceptional_monomials(&self) -> &[Monomial] {
        &self.exceptional_monomials
    }

    /// Registers a named ideal (replacing any previous one of that name).
    pub fn insert_ideal(&mut self, name: String, ideal: Ideal) -> Result<(), EngineError> {
        if ideal.nvars() != self.nvars() {
            return Err(EngineError::DimensionMismatch {
                expected: self.nvars(),
                got: ideal.nvars(),
            });
        }
        self.ideals.insert(name, ideal);
        Ok(())
    }

    /// Index of a variable by name.
    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// How an ideal moved through a blowup step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformLabel {
    /// Exceptional factor divided out once (center inside the zero set).
    Controlled,
    /// Plain substitution.
    Total,
}

impl fmt::Display for TransformLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformLabel::Controlled => "controlled",
            TransformLabel::Total => "total",
        })
    }
}

/// Which certificate backed the transform of the distribution.
#[derive(Debug, Clone)]
pub enum CenterCertificate {
    /// The center ideal is invariant: all pullbacks analytic.
    Invariant,
    /// The center is admissible with a constructed split; carries the number
    /// of transverse generators.
    Transverse(usize),
    /// The center is not admissible: the chart carries the cleared candidate
    /// module (exceptional-scaled pullbacks, analytic pullbacks, syzygy
    /// fields) without a transform certificate.
    Candidate { syzygy_fields: usize },
}

impl CenterCertificate {
    pub fn is_certified(&self) -> bool {
        !matches!(self, CenterCertificate::Candidate { .. })
    }
}

/// Everything a blowup step decided and produced, alongside the mutated
/// tower state.
#[derive(Debug, Clone)]
pub struct BlowupStepOutcome {
    admissibility: AdmissibilityReport,
    certificate: CenterCertificate,
    labels: BTreeMap<String, TransformLabel>,
    totals: BTreeMap<String, Ideal>,
}

impl BlowupStepOutcome {
    pub fn admissibility(&self) -> &AdmissibilityReport {
        &self.admissibility
    }

    pub fn certificate(&self) -> &CenterCertificate {
        &self.certificate
    }

    /// Per-ideal record of which transform was applied.
    pub fn labels(&self) -> &BTreeMap<String, TransformLabel> {
        &self.labels
    }

    /// Total transform of every named ideal (also for the controlled ones,
    /// where the stored chart ideal has the exceptional factor divided out).
    pub fn totals(&self) -> &BTreeMap<String, Ideal> {
        &self.totals
    }
}

/// A coordinate view of the current chart under an affine change: the
/// renamed variables with the rewritten distribution and ideals. The tower
/// itself is not modified by a view.
#[derive(Debug, Clone)]
pub struct ChangeView {
    names: Vec<String>,
    theta: Vec<Derivation>,
    ideals: BTreeMap<String, Ideal>,
}

impl ChangeView {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn theta(&self) -> &[Derivation] {
        &self.theta
    }

    pub fn ideals(&self) -> &BTreeMap<String, Ideal> {
        &self.ideals
    }
}

/// An append-only tower of charts connected by blowup chart maps and
/// coordinate rebases.
#[derive(Debug, Clone)]
pub struct Tower {
    charts: Vec<FoliatedChart>,
    blowup_steps: usize,
}

impl Tower {
    pub fn new(ground: FoliatedChart) -> Self {
        Tower {
            charts: vec![ground],
            blowup_steps: 0,
        }
    }

    pub fn charts(&self) -> &[FoliatedChart] {
        &self.charts
    }

    pub fn current(&self) -> &FoliatedChart {
        self.charts.last().expect("tower is never empty")
    }

    pub fn current_mut(&mut self) -> &mut FoliatedChart {
        self.charts.last_mut().expect("tower is never empty")
    }

    /// Completed blowup steps.
    pub fn blowup_steps(&self) -> usize {
        self.blowup_steps
    }

    fn push_monomial_through(
        monomial: &Monomial,
        map: &ChartMap,
    ) -> Result<Monomial, EngineError> {
        let n = map.nvars();
        let as_poly = Polynomial::from_term(n, monomial.clone(), Q::one());
        let pulled = map.pull_polynomial(&as_poly)?;
        let mut terms = pulled.terms();
        match (terms.next(), terms.next()) {
            (Some((m, _)), None) => Ok(m.clone()),
            _ => Err(EngineError::Internal(
                "chart substitution of a monomial is not a monomial".into(),
            )),
        }
    }

    /// Blows up a coordinate-subspace center and passes to one chart.
    ///
    /// The center is classified from its admissibility report: invariant
    /// centers get the all-analytic pullback, admissible ones the adapted
    /// transform through a constructed split, and non-admissible ones the
    /// flagged candidate module. Each named ideal moves by its controlled
    /// transform when the center sits inside its zero set and by its total
    /// transform otherwise. Variable names get a prime appended unless an
    /// override list is given.
    pub fn apply_blowup(
        &mut self,
        center_variables: &[usize],
        chart_variable: usize,
        names_override: Option<Vec<String>>,
    ) -> Result<BlowupStepOutcome, EngineError> {
        let chart = self.current().clone();
        let n = chart.nvars();
        let center = BlowupCenter::new(n, center_variables.to_vec())?;
        let map = blowup_chart(&center, chart_variable)?;
        let c = map.chart_variable();
        let center_ideal = center.ideal();

        let report = admissibility_report(chart.theta(), &center_ideal)?;

        // Divisors: records on a center variable other than the chart one
        // keep their variable; the chart variable's divisor is replaced by
        // the exceptional one and its strict transform misses this chart.
        let mut records: Vec<DivisorRecord> = chart
            .ledger()
            .records()
            .iter()
            .map(|r| DivisorRecord {
                origin: r.origin,
                variable: r.variable.filter(|&v| v != c),
            })
            .collect();
        let step_index = self.blowup_steps + 1;
        records.push(DivisorRecord {
            origin: DivisorOrigin::ExceptionalOfStep(step_index),
            variable: Some(c),
        });
        let ledger = DivisorLedger { records };
        let mut log_variables = ledger.visible_variables();
        if !log_variables.contains(&c) {
            log_variables.push(c);
        }

        let (certificate, new_gens) = if report.is_admissible() {
            let split = transverse_split(chart.theta(), &center_ideal, &report)?;
            if report.d0() == 0 {
                let gens = adapted_strict_transform(
                    CenterKind::Invariant(chart.theta().generators()),
                    &map,
                    &log_variables,
                )?;
                (CenterCertificate::Invariant, gens)
            } else {
                let gens =
                    adapted_strict_transform(CenterKind::Split(&split), &map, &log_variables)?;
                (CenterCertificate::Transverse(split.transverse().len()), gens)
            }
        } else {
            let pulled = chart
                .theta()
                .generators()
                .iter()
                .map(|g| pullback_derivation(g, &map))
                .collect::<Result<Vec<_>, _>>()?;
            let mut gens = Vec::new();
            for p in &pulled {
                if p.is_analytic() {
                    gens.push(p.to_derivation()?);
                } else {
                    let cleared = p.mul_variable(c);
                    if !cleared.is_analytic() {
                        return Err(EngineError::PoleObstruction(
                            "pullback has a pole of order above one".into(),
                        ));
                    }
                    gens.push(cleared.to_derivation()?);
                }
            }
            let extra = strict_closure_syzygies(&pulled, &map)?;
            let syzygy_fields = extra.len();
            gens.extend(extra);
            (CenterCertificate::Candidate { syzygy_fields }, gens)
        };

        let mut labels = BTreeMap::new();
        let mut totals = BTreeMap::new();
        let mut new_ideals = BTreeMap::new();
        for (name, ideal) in chart.ideals() {
            let total = total_transform_ideal(ideal, &map)?;
            totals.insert(name.clone(), total.clone());
            if center_ideal.contains_ideal(ideal)? {
                labels.insert(name.clone(), TransformLabel::Controlled);
                new_ideals.insert(name.clone(), controlled_transform_ideal(ideal, &map)?);
            } else {
                labels.insert(name.clone(), TransformLabel::Total);
                new_ideals.insert(name.clone(), total);
            }
        }

        let mut monomials = chart
            .exceptional_monomials()
            .iter()
            .map(|m| Self::push_monomial_through(m, &map))
            .collect::<Result<Vec<_>, _>>()?;
        monomials.push(Monomial::var(c));

        let names = match names_override {
            Some(names) => {
                if names.len() != n {
                    return Err(EngineError::DimensionMismatch {
                        expected: n,
                        got: names.len(),
                    });
                }
                names
            }
            None => chart.names().iter().map(|s| format!("{s}'")).collect(),
        };

        let theta = Distribution::new(new_gens, chart.theta().leaf_dimension())?;
        let mut next = FoliatedChart::new(names, theta, &[])?;
        next.ideals = new_ideals;
        next.ledger = ledger;
        next.exceptional_monomials = monomials;
        self.charts.push(next);
        self.blowup_steps = step_index;

        Ok(BlowupStepOutcome {
            admissibility: report,
            certificate,
            labels,
            totals,
        })
    }

    /// Rewrites the current chart under an affine change without modifying
    /// the tower: renamed coordinates, transformed generators and ideals.
    pub fn change_view(
        &self,
        change: &CoordinateChange,
        names: Vec<String>,
    ) -> Result<ChangeView, EngineError> {
        let chart = self.current();
        let n = chart.nvars();
        if change.nvars() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: change.nvars(),
            });
        }
        if names.len() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: names.len(),
            });
        }
        let theta = chart
            .theta()
            .generators()
            .iter()
            .map(|g| change.apply_to_derivation(g))
            .collect::<Result<Vec<_>, _>>()?;
        let mut ideals = BTreeMap::new();
        for (name, ideal) in chart.ideals() {
            let gens = ideal
                .generators()
                .iter()
                .map(|f| change.apply_to_polynomial(f))
                .collect::<Result<Vec<_>, _>>()?;
            ideals.insert(name.clone(), Ideal::new(n, gens)?);
        }
        Ok(ChangeView { names, theta, ideals })
    }

    /// Applies an affine change in place: the tower continues in the new
    /// coordinates. Divisor records keep their variable only when the change
    /// maps it to a plain coordinate; exceptional bookkeeping requires every
    /// recorded equation to stay a monomial.
    pub fn apply_rebase(
        &mut self,
        change: &CoordinateChange,
        names: Vec<String>,
    ) -> Result<(), EngineError> {
        let view = self.change_view(change, names)?;
        let chart = self.current();
        let n = chart.nvars();
        let mut monomials = Vec::new();
        for m in chart.exceptional_monomials() {
            let as_poly = Polynomial::from_term(n, m.clone(), Q::one());
            let moved = change.apply_to_polynomial(&as_poly)?;
            let mut terms = moved.terms();
            match (terms.next(), terms.next()) {
                (Some((mono, _)), None) => monomials.push(mono.clone()),
                _ => {
                    return Err(EngineError::Precondition(
                        "the change does not keep the exceptional equations monomial".into(),
                    ))
                }
            }
        }
        let inverse = change.inverse_change();
        let inverse_rows = inverse.matrix_rows();
        let records = chart
            .ledger()
            .records()
            .iter()
            .map(|r| {
                let variable = r.variable.and_then(|v| {
                    // x_v = sum_j inv[v][j] y_j + p_v is a coordinate
                    // hyperplane exactly when one coefficient survives and
                    // the affine part vanishes.
                    let row = &inverse_rows[v];
                    let nonzero: Vec<usize> =
                        (0..n).filter(|&j| !row[j].is_zero()).collect();
                    if nonzero.len() == 1 && change.translation()[v].is_zero() {
                        Some(nonzero[0])
                    } else {
                        None
                    }
                });
                DivisorRecord {
                    origin: r.origin,
                    variable,
                }
            })
            .collect();
        let d = chart.theta().leaf_dimension();
        let current = self.current_mut();
        current.names = view.names;
        current.theta = Distribution::new(view.theta, d)?;
        current.ideals = view.ideals;
        current.ledger = DivisorLedger { records };
        current.exceptional_monomials = monomials;
        Ok(())
    }
}

/// A formal power of the product of pushed-forward exceptional equations:
/// `(prod of step monomials)^alpha`. Non-negative powers expand to a
/// principal monomial ideal; negative powers stay a bookkeeping record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalMonomialIdeal {
    nvars: usize,
    base: Monomial,
    alpha: i64,
}

impl FormalMonomialIdeal {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Product of the per-step exceptional monomials (exponent 1).
    pub fn base(&self) -> &Monomial {
        &self.base
    }

    pub fn alpha(&self) -> i64 {
        self.alpha
    }

    /// Per-variable exponents of the formal power.
    pub fn exponent_record(&self) -> Vec<(usize, i64)> {
        self.base
            .pairs()
            .iter()
            .map(|&(v, e)| (v, i64::from(e) * self.alpha))
            .collect()
    }

    /// The principal monomial ideal, for non-negative powers only.
    pub fn as_ideal(&self) -> Option<Ideal> {
        if self.alpha < 0 {
            return None;
        }
        let mut pairs = Vec::new();
        for &(v, e) in self.base.pairs() {
            let total = u32::try_from(i64::from(e) * self.alpha).ok()?;
            pairs.push((v, total));
        }
        let m = Monomial::from_pairs(pairs);
        let gen = Polynomial::from_term(self.nvars, m, Q::one());
        Some(Ideal::new(self.nvars, vec![gen]).expect("principal monomial ideal"))
    }
}

/// The step-product exceptional sheaf of the tower's current chart at the
/// given power.
pub fn k_sheaf(tower: &Tower, alpha: i64) -> FormalMonomialIdeal {
    let chart = tower.current();
    let mut exponents: BTreeMap<usize, u32> = BTreeMap::new();
    for m in chart.exceptional_monomials() {
        for &(v, e) in m.pairs() {
            *exponents.entry(v).or_insert(0) += e;
        }
    }
    FormalMonomialIdeal {
        nvars: chart.nvars(),
        base: Monomial::from_pairs(exponents.into_iter().collect()),
        alpha,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q_int;

    fn pvar(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i).unwrap()
    }

    fn winding_chart() -> FoliatedChart {
        let n = 3;
        let field = Derivation::new(vec![pvar(n, 2), Polynomial::zero(n), Polynomial::one(n)])
            .unwrap();
        let theta = Distribution::new(vec![field], 1).unwrap();
        let mut chart = FoliatedChart::new(
            vec!["x".into(), "y".into(), "z".into()],
            theta,
            &[],
        )
        .unwrap();
        chart
            .insert_ideal(
                "I".into(),
                Ideal::new(n, vec![pvar(n, 0), pvar(n, 1)]).unwrap(),
            )
            .unwrap();
        chart
    }

    #[test]
    fn first_step_of_the_winding_tower() {
        let n = 3;
        let mut tower = Tower::new(winding_chart());
        let outcome = tower.apply_blowup(&[0, 1, 2], 2, None).unwrap();
        assert!(outcome.admissibility().is_admissible());
        assert!(matches!(outcome.certificate(), CenterCertificate::Transverse(1)));
        assert_eq!(outcome.labels()["I"], TransformLabel::Controlled);
        // Total transform (x z, y z); stored controlled transform (x, y).
        let expected_total = Ideal::new(
            n,
            vec![&pvar(n, 0) * &pvar(n, 2), &pvar(n, 1) * &pvar(n, 2)],
        )
        .unwrap();
        assert_eq!(
            outcome.totals()["I"].generators(),
            expected_total.generators()
        );
        let chart = tower.current();
        assert_eq!(
            chart.ideal("I").unwrap().generators(),
            &[pvar(n, 0), pvar(n, 1)]
        );
        // Adapted generator z d/dz + (z - x) d/dx - y d/dy.
        let expected = Derivation::new(vec![
            &pvar(n, 2) - &pvar(n, 0),
            -&pvar(n, 1),
            pvar(n, 2),
        ])
        .unwrap();
        assert_eq!(chart.theta().generators(), &[expected][..]);
        assert_eq!(chart.names(), &["x'", "y'", "z'"]);
        assert_eq!(chart.ledger().records().len(), 1);
        assert_eq!(
            chart.ledger().records()[0].origin(),
            DivisorOrigin::ExceptionalOfStep(1)
        );
        assert_eq!(chart.ledger().records()[0].variable(), Some(2));
        assert_eq!(chart.exceptional_monomials(), &[Monomial::var(2)]);
    }

    #[test]
    fn full_winding_tower_resolves_the_ideal() {
        let n = 3;
        let mut tower = Tower::new(winding_chart());
        tower.apply_blowup(&[0, 1, 2], 2, None).unwrap();

        let second = tower.apply_blowup(&[0, 1, 2], 2, None).unwrap();
        assert!(second.admissibility().is_admissible());
        assert_eq!(second.admissibility().d0(), 0);
        assert!(matches!(second.certificate(), CenterCertificate::Invariant));
        let chart = tower.current();
        let one = Polynomial::one(n);
        let expected = Derivation::new(vec![
            &one - &pvar(n, 0).scale(&q_int(2)),
            -&pvar(n, 1).scale(&q_int(2)),
            pvar(n, 2),
        ])
        .unwrap();
        assert_eq!(chart.theta().generators(), &[expected][..]);
        assert_eq!(
            chart.ideal("I").unwrap().generators(),
            &[pvar(n, 0), pvar(n, 1)]
        );
        // The step-1 exceptional divisor misses the second z-chart.
        assert_eq!(chart.ledger().records()[0].variable(), None);
        assert_eq!(chart.ledger().records()[1].variable(), Some(2));
        assert_eq!(
            chart.exceptional_monomials(),
            &[Monomial::var(2), Monomial::var(2)]
        );
        assert_eq!(
            k_sheaf(&tower, 1).as_ideal().unwrap().generators(),
            &[&pvar(n, 2) * &pvar(n, 2)]
        );

        let third = tower.apply_blowup(&[0, 1], 1, None).unwrap();
        assert!(third.admissibility().is_admissible());
        assert!(matches!(third.certificate(), CenterCertificate::Transverse(1)));
        let chart = tower.current();
        // d/dx - 2 y^2 d/dy + y z d/dz
        let expected = Derivation::new(vec![
            Polynomial::one(n),
            (&pvar(n, 1) * &pvar(n, 1)).scale(&q_int(-2)),
            &pvar(n, 1) * &pvar(n, 2),
        ])
        .unwrap();
        assert_eq!(chart.theta().generators(), &[expected][..]);
        assert!(chart.ideal("I").unwrap().is_unit_ideal());
        assert_eq!(chart.names(), &["x'''", "y'''", "z'''"]);
        assert_eq!(
            chart.exceptional_monomials(),
            &[Monomial::var(2), Monomial::var(2), Monomial::var(1)]
        );
    }

    #[test]
    fn non_admissible_center_takes_the_candidate_path() {
        let n = 3;
        let mut tower = Tower::new(winding_chart());
        let outcome = tower.apply_blowup(&[0, 1], 0, None).unwrap();
        assert!(!outcome.admissibility().is_admissible());
        assert!(matches!(
            outcome.certificate(),
            CenterCertificate::Candidate { syzygy_fields: 0 }
        ));
        let chart = tower.current();
        // Cleared candidate: x z d/dx - y z d/dy + x d/dz.
        let expected = Derivation::new(vec![
            &pvar(n, 0) * &pvar(n, 2),
            -&(&pvar(n, 1) * &pvar(n, 2)),
            pvar(n, 0),
        ])
        .unwrap();
        assert_eq!(chart.theta().generators(), &[expected][..]);
        assert_eq!(outcome.labels()["I"], TransformLabel::Controlled);
    }

    #[test]
    fn sheaf_powers_and_formal_negatives() {
        let mut tower = Tower::new(winding_chart());
        assert!(k_sheaf(&tower, 1).as_ideal().unwrap().is_unit_ideal());
        tower.apply_blowup(&[0, 1, 2], 2, None).unwrap();
        let n = 3;
        assert_eq!(
            k_sheaf(&tower, 1).as_ideal().unwrap().generators(),
            &[pvar(n, 2)]
        );
        assert!(k_sheaf(&tower, 0).as_ideal().unwrap().is_unit_ideal());
        let negative = k_sheaf(&tower, -1);
        assert!(negative.as_ideal().is_none());
        assert_eq!(negative.exponent_record(), vec![(2, -1)]);
    }

    #[test]
    fn view_reports_renamed_diagonal_field() {
        // After the first step, the affine view (2x - z, y, z) straightens
        // the carried field to -u d/du - v d/dv + w d/dw.
        let mut tower = Tower::new(winding_chart());
        tower.apply_blowup(&[0, 1, 2], 2, None).unwrap();
        let change = CoordinateChange::new(
            vec![
                vec![q_int(2), q_int(0), q_int(-1)],
                vec![q_int(0), q_int(1), q_int(0)],
                vec![q_int(0), q_int(0), q_int(1)],
            ],
            vec![q_int(0), q_int(0), q_int(0)],
        )
        .unwrap();
        let view = tower
            .change_view(&change, vec!["u".into(), "v".into(), "w".into()])
            .unwrap();
        let n = 3;
        let expected = Derivation::new(vec![-&pvar(n, 0), -&pvar(n, 1), pvar(n, 2)]).unwrap();
        assert_eq!(view.theta(), &[expected][..]);
        assert_eq!(view.names(), &["u", "v", "w"]);
        // The tower itself is untouched.
        assert_eq!(tower.current().names(), &["x'", "y'", "z'"]);
    }

    #[test]
    fn rebase_moves_ledger_and_monomials() {
        let mut tower = Tower::new(winding_chart());
        tower.apply_blowup(&[0, 1, 2], 2, None).unwrap();
        // Swap the first two coordinates; z stays, so the exceptional
        // bookkeeping survives.
        let change = CoordinateChange::new(
            vec![
                vec![q_int(0), q_int(1), q_int(0)],
                vec![q_int(1), q_int(0), q_int(0)],
                vec![q_int(0), q_int(0), q_int(1)],
            ],
            vec![q_int(0), q_int(0), q_int(0)],
        )
        .unwrap();
        tower
            .apply_rebase(&change, vec!["a".into(), "b".into(), "c".into()])
            .unwrap();
        let chart = tower.current();
        assert_eq!(chart.names(), &["a", "b", "c"]);
        assert_eq!(chart.ledger().records()[0].variable(), Some(2));
        assert_eq!(chart.exceptional_monomials(), &[Monomial::var(2)]);
    }
}
