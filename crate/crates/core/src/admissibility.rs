//! Center admissibility reports, eigen-generators of invariant ideals under
//! coordinate-aligned bases, and the transverse/invariant split that
//! certifies an admissible center for the adapted transform.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num::Zero;

use crate::derivation::{
    check_monomial_basis, classify_elementary, CoordinateChange, Derivation, Distribution,
    ElementaryKind,
};
use crate::error::EngineError;
use crate::fitting::{fitting_ideal, is_invariant, poly_det};
use crate::ideal::Ideal;
use crate::linalg::QMatrix;
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::{Polynomial, Q};

/// How a minor ideal sits against the center ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterRelation {
    /// minors + center = (1)
    Unit,
    /// minors ⊆ center
    Contained,
    /// neither of the above
    Neither,
}

impl fmt::Display for CenterRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CenterRelation::Unit => "unit",
            CenterRelation::Contained => "contained",
            CenterRelation::Neither => "neither",
        };
        f.write_str(s)
    }
}

/// One row of an admissibility report: the k-th minor ideal of the
/// application matrix and its relation to the center ideal.
#[derive(Debug, Clone)]
pub struct AdmissibilityRecord {
    k: usize,
    minors: Ideal,
    relation: CenterRelation,
}

impl AdmissibilityRecord {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn minors(&self) -> &Ideal {
        &self.minors
    }

    pub fn relation(&self) -> CenterRelation {
        self.relation
    }
}

/// The full admissibility verdict for a center ideal: per-size minor
/// records, the largest size whose minors are a unit on the center, and a
/// witness minor when the verdict is negative.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    admissible: bool,
    d0: usize,
    records: Vec<AdmissibilityRecord>,
    witness: Option<Polynomial>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.admissible
    }

    /// Largest k with minors + center = (1); sizes above must be contained
    /// in the center for the verdict to be positive.
    pub fn d0(&self) -> usize {
        self.d0
    }

    pub fn records(&self) -> &[AdmissibilityRecord] {
        &self.records
    }

    /// A minor that is neither a unit on the center nor contained in it,
    /// present exactly when the verdict is negative because of such a minor.
    pub fn witness(&self) -> Option<&Polynomial> {
        self.witness.as_ref()
    }
}

/// Decides admissibility of `center` for the distribution: minors of every
/// size up to the leaf dimension must be a unit on the center up to some
/// size `d0` and contained in the center beyond it.
pub fn admissibility_report(
    dist: &Distribution,
    center: &Ideal,
) -> Result<AdmissibilityReport, EngineError> {
    if dist.nvars() != center.nvars() {
        return Err(EngineError::DimensionMismatch {
            expected: center.nvars(),
            got: dist.nvars(),
        });
    }
    let mut records = Vec::new();
    for k in 1..=dist.leaf_dimension() {
        let minors = fitting_ideal(dist.generators(), center, k)?;
        let relation = if minors.sum(center)?.is_unit_ideal() {
            CenterRelation::Unit
        } else if center.contains_ideal(&minors)? {
            CenterRelation::Contained
        } else {
            CenterRelation::Neither
        };
        records.push(AdmissibilityRecord { k, minors, relation });
    }
    let d0 = records
        .iter()
        .take_while(|r| r.relation == CenterRelation::Unit)
        .count();
    let admissible = records[d0..]
        .iter()
        .all(|r| r.relation == CenterRelation::Contained);
    let mut witness = None;
    if !admissible {
        for r in &records {
            if r.relation == CenterRelation::Neither {
                for g in r.minors.generators() {
                    if !center.contains(g)? {
                        witness = Some(g.clone());
                        break;
                    }
                }
                break;
            }
        }
    }
    Ok(AdmissibilityReport {
        admissible,
        d0,
        records,
        witness,
    })
}

/// Coefficients of `g` by powers of `x_var`, with the power stripped;
/// nonzero ones only, ascending in the power.
fn variable_coefficients(g: &Polynomial, var: usize) -> Vec<Polynomial> {
    let mut by_power: BTreeMap<u32, Vec<(Monomial, Q)>> = BTreeMap::new();
    for (m, c) in g.terms() {
        let k = m.degree_of(var);
        let stripped = Monomial::from_pairs(
            m.pairs()
                .iter()
                .filter(|&&(v, _)| v != var)
                .copied()
                .collect(),
        );
        by_power.entry(k).or_default().push((stripped, c.clone()));
    }
    by_power
        .into_values()
        .map(|terms| Polynomial::from_terms(g.nvars(), terms))
        .filter(|p| !p.is_zero())
        .collect()
}

/// Weight-homogeneous components of `g` for the diagonal weight vector,
/// ascending in the weight; nonzero ones only.
fn weight_components(g: &Polynomial, weights: &[Q]) -> Vec<Polynomial> {
    let mut by_weight: BTreeMap<Q, Vec<(Monomial, Q)>> = BTreeMap::new();
    for (m, c) in g.terms() {
        let mut w = Q::zero();
        for &(v, e) in m.pairs() {
            w += &weights[v] * Q::from_integer(e.into());
        }
        by_weight.entry(w).or_default().push((m.clone(), c.clone()));
    }
    by_weight
        .into_values()
        .map(|terms| Polynomial::from_terms(g.nvars(), terms))
        .filter(|p| !p.is_zero())
        .collect()
}

/// Membership in the localization at the origin, decided through the
/// certificate `h ∈ I + m·h`: it forces `(1 - m)·h ∈ I` for some `m`
/// vanishing at the origin, so `h` lies in `I` there.
fn locally_contains(ideal: &Ideal, h: &Polynomial) -> Result<bool, EngineError> {
    if h.is_zero() {
        return Ok(true);
    }
    let n = ideal.nvars();
    let mut gens = ideal.generators().to_vec();
    for i in 0..n {
        gens.push(&Polynomial::var(n, i).expect("index in range") * h);
    }
    Ideal::new(n, gens)?.contains(h)
}

/// Rewrites the generators of an invariant ideal as eigen-generators of a
/// coordinate-aligned basis: each output is annihilated by every partial
/// generator and weight-homogeneous for every diagonal generator. The
/// operation works at the origin's local ring: invariance is required (and
/// verified) there, the output list contains the input generators globally,
/// and every output carries a unit-multiple membership certificate.
pub fn invariant_generators(
    dist: &Distribution,
    ideal: &Ideal,
) -> Result<Vec<Polynomial>, EngineError> {
    if dist.nvars() != ideal.nvars() {
        return Err(EngineError::DimensionMismatch {
            expected: ideal.nvars(),
            got: dist.nvars(),
        });
    }
    if let Err(k) = check_monomial_basis(dist.generators()) {
        return Err(EngineError::Precondition(format!(
            "generator {k} of the distribution is not coordinate-aligned"
        )));
    }
    for field in dist.generators() {
        for f in ideal.generators() {
            if !locally_contains(ideal, &field.apply(f)?)? {
                return Err(EngineError::Precondition(
                    "the ideal is not invariant under the distribution at the origin".into(),
                ));
            }
        }
    }
    let mut gens: Vec<Polynomial> = ideal.generators().to_vec();
    for field in dist.generators() {
        let kind = classify_elementary(field).expect("basis checked above");
        let mut next: Vec<Polynomial> = Vec::new();
        for g in &gens {
            let pieces = match &kind {
                ElementaryKind::Zero => vec![g.clone()],
                ElementaryKind::Partial { var, .. } => variable_coefficients(g, *var),
                ElementaryKind::Diagonal { weights } => weight_components(g, weights),
            };
            for piece in pieces {
                let normalized = piece.monic(MonomialOrder::GrevLex);
                if !next.contains(&normalized) {
                    next.push(normalized);
                }
            }
        }
        gens = next;
    }
    let rebuilt = Ideal::new(ideal.nvars(), gens.clone())?;
    if !rebuilt.contains_ideal(ideal)? {
        return Err(EngineError::Internal(
            "eigen-generator extraction lost part of the ideal".into(),
        ));
    }
    for h in &gens {
        if !locally_contains(ideal, h)? {
            return Err(EngineError::Internal(
                "an extracted generator is not in the ideal at the origin".into(),
            ));
        }
        for field in dist.generators() {
            let eigen = match classify_elementary(field).expect("basis checked above") {
                ElementaryKind::Zero => true,
                ElementaryKind::Partial { var, .. } => h.degree_in(var) == 0,
                ElementaryKind::Diagonal { weights } => {
                    weight_components(h, &weights).len() <= 1
                }
            };
            if !eigen {
                return Err(EngineError::Internal(
                    "an extracted generator is not an eigen-element of the basis".into(),
                ));
            }
        }
    }
    Ok(gens)
}

/// An admissible center's certificate: transverse generators (those with a
/// unit minor against selected center functions), the corrected
/// invariant-side generators, and the affine change that renames the
/// selected functions into leading coordinates.
#[derive(Debug, Clone)]
pub struct TransverseSplit {
    transverse: Vec<Derivation>,
    invariant_side: Vec<Derivation>,
    change: CoordinateChange,
    selected_generators: Vec<usize>,
    selected_functions: Vec<usize>,
}

impl TransverseSplit {
    pub fn transverse(&self) -> &[Derivation] {
        &self.transverse
    }

    pub fn invariant_side(&self) -> &[Derivation] {
        &self.invariant_side
    }

    pub fn change(&self) -> &CoordinateChange {
        &self.change
    }

    /// Indices into the distribution's generator list chosen as transverse.
    pub fn selected_generators(&self) -> &[usize] {
        &self.selected_generators
    }

    /// Indices into the center's generator list backing the unit minor.
    pub fn selected_functions(&self) -> &[usize] {
        &self.selected_functions
    }
}

/// Adjugate of a square polynomial matrix (transposed cofactors), so that
/// `m · adj = det · identity`.
fn poly_adjugate(m: &[Vec<Polynomial>]) -> Vec<Vec<Polynomial>> {
    let n = m.len();
    let mut adj = vec![vec![Polynomial::zero(0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let sub: Vec<Vec<Polynomial>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != j)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != i)
                        .map(|(_, e)| e.clone())
                        .collect()
                })
                .collect();
            let minor = if sub.is_empty() {
                Polynomial::one(m[0][0].nvars())
            } else {
                poly_det(&sub)
            };
            adj[i][j] = if (i + j) % 2 == 0 { minor } else { -&minor };
        }
    }
    adj
}

/// Builds the affine change renaming the selected center functions (which
/// must be affine-linear) into the leading coordinates, completed greedily
/// by coordinate directions.
fn normalizing_change(
    selected: &[&Polynomial],
    nvars: usize,
) -> Result<CoordinateChange, EngineError> {
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut constants: Vec<Q> = Vec::new();
    for f in selected {
        let (c0, lin, higher) = f.linear_decomposition();
        if higher {
            return Err(EngineError::SplitNotConstructible(
                "a selected center function is nonlinear; normalization is restricted to affine-linear changes"
                    .into(),
            ));
        }
        rows.push(lin);
        constants.push(c0);
    }
    let translation = if rows.is_empty() {
        vec![Q::zero(); nvars]
    } else {
        let system = QMatrix::from_rows(rows.clone());
        let rhs: Vec<Q> = constants.iter().map(|c| -c).collect();
        system.solve(&rhs).ok_or_else(|| {
            EngineError::SplitNotConstructible(
                "no translation matches the constant parts of the selected center functions".into(),
            )
        })?
    };
    let mut completed = rows;
    for i in 0..nvars {
        if completed.len() == nvars {
            break;
        }
        let mut unit = vec![Q::zero(); nvars];
        unit[i] = Q::from_integer(1.into());
        let mut tentative = completed.clone();
        tentative.push(unit);
        if QMatrix::from_rows(tentative.clone()).rank() > completed.len() {
            completed = tentative;
        }
    }
    if completed.len() < nvars {
        return Err(EngineError::SplitNotConstructible(
            "selected center functions have dependent linear parts".into(),
        ));
    }
    CoordinateChange::new(completed, translation)
}

/// Constructs the transverse/invariant split certified by an admissibility
/// report: picks `d0` generators and center functions with a unit minor,
/// corrects the remaining generators to annihilate the selected functions,
/// and verifies the corrected side leaves the center invariant.
pub fn transverse_split(
    dist: &Distribution,
    center: &Ideal,
    report: &AdmissibilityReport,
) -> Result<TransverseSplit, EngineError> {
    if dist.nvars() != center.nvars() {
        return Err(EngineError::DimensionMismatch {
            expected: center.nvars(),
            got: dist.nvars(),
        });
    }
    if !report.is_admissible() {
        return Err(EngineError::Precondition(
            "the center is not admissible; no split exists".into(),
        ));
    }
    let n = dist.nvars();
    let gens = dist.generators();
    let fs = center.generators();
    let d0 = report.d0();
    if d0 == 0 {
        if !is_invariant(gens, center)? {
            return Err(EngineError::Internal(
                "admissible center with d0 = 0 is not invariant".into(),
            ));
        }
        return Ok(TransverseSplit {
            transverse: Vec::new(),
            invariant_side: gens.to_vec(),
            change: CoordinateChange::identity(n),
            selected_generators: Vec::new(),
            selected_functions: Vec::new(),
        });
    }
    let mut selection: Option<(Vec<usize>, Vec<usize>, Vec<Vec<Polynomial>>)> = None;
    'search: for rows in (0..gens.len()).combinations(d0) {
        for cols in (0..fs.len()).combinations(d0) {
            let matrix: Vec<Vec<Polynomial>> = rows
                .iter()
                .map(|&r| {
                    cols.iter()
                        .map(|&c| gens[r].apply(&fs[c]))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let det = poly_det(&matrix);
            if det.is_zero() {
                continue;
            }
            let principal = Ideal::new(n, vec![det])?;
            if principal.sum(center)?.is_unit_ideal() {
                selection = Some((rows, cols, matrix));
                break 'search;
            }
        }
    }
    let (rows, cols, matrix) = selection.ok_or_else(|| {
        EngineError::SplitNotConstructible(
            "no selection of generators and center functions has a unit minor on the center".into(),
        )
    })?;
    let transverse: Vec<Derivation> = rows.iter().map(|&r| gens[r].clone()).collect();
    let remaining: Vec<usize> = (0..gens.len()).filter(|r| !rows.contains(r)).collect();
    let mut invariant_side = Vec::new();
    if !remaining.is_empty() {
        let det = poly_det(&matrix);
        let det_const = det.as_constant().ok_or_else(|| {
            EngineError::SplitNotConstructible(
                "the selected unit minor has a non-constant determinant; corrections to the remaining generators are not polynomial"
                    .into(),
            )
        })?;
        if det_const.is_zero() {
            return Err(EngineError::Internal("unit minor with zero determinant".into()));
        }
        let adj = poly_adjugate(&matrix);
        for &j in &remaining {
            let u: Vec<Polynomial> = cols
                .iter()
                .map(|&c| gens[j].apply(&fs[c]))
                .collect::<Result<Vec<_>, _>>()?;
            let mut z = gens[j].clone();
            for (k, y) in transverse.iter().enumerate() {
                let mut num = Polynomial::zero(n);
                for (t, ut) in u.iter().enumerate() {
                    num = &num + &(ut * &adj[t][k]);
                }
                let coeff = num.scale(&det_const.recip());
                z = z.sub(&y.mul_polynomial(&coeff));
            }
            for &c in &cols {
                if !z.apply(&fs[c])?.is_zero() {
                    return Err(EngineError::Internal(
                        "corrected generator fails to annihilate a selected center function".into(),
                    ));
                }
            }
            invariant_side.push(z);
        }
        if !is_invariant(&invariant_side, center)? {
            return Err(EngineError::Internal(
                "corrected generators do not leave the center invariant".into(),
            ));
        }
    }
    let selected: Vec<&Polynomial> = cols.iter().map(|&c| &fs[c]).collect();
    let change = normalizing_change(&selected, n)?;
    Ok(TransverseSplit {
        transverse,
        invariant_side,
        change,
        selected_generators: rows,
        selected_functions: cols,
    })
}
