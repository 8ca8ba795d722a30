//! Polynomial vector fields (derivations of the coordinate ring), Lie
//! brackets, involutivity certificates, meromorphic counterparts with
//! controlled poles, affine coordinate changes, and normalization of
//! distributions to coordinate-aligned bases.

use std::fmt;

use num::traits::{One, Signed, Zero};

use crate::error::EngineError;
use crate::laurent::LaurentPolynomial;
use crate::linalg::{rational_roots_with_multiplicity, QMatrix};
use crate::modvec::{module_membership, ModVec};
use crate::poly::{Point, Polynomial, Q};

/// A vector field `X = sum_i A_i d/dx_i` with polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    nvars: usize,
    coeffs: Vec<Polynomial>,
}

impl Derivation {
    pub fn new(coeffs: Vec<Polynomial>) -> Result<Self, EngineError> {
        if coeffs.is_empty() {
            return Err(EngineError::Precondition(
                "a derivation needs at least one coordinate".to_string(),
            ));
        }
        let nvars = coeffs.len();
        for c in &coeffs {
            if c.nvars() != nvars {
                return Err(EngineError::DimensionMismatch { expected: nvars, got: c.nvars() });
            }
        }
        Ok(Derivation { nvars, coeffs })
    }

    pub fn zero(nvars: usize) -> Self {
        Derivation { nvars, coeffs: vec![Polynomial::zero(nvars); nvars] }
    }

    /// The coordinate field `d/dx_i`.
    pub fn partial(nvars: usize, i: usize) -> Result<Self, EngineError> {
        if i >= nvars {
            return Err(EngineError::IndexOutOfRange { index: i, nvars });
        }
        let mut coeffs = vec![Polynomial::zero(nvars); nvars];
        coeffs[i] = Polynomial::one(nvars);
        Ok(Derivation { nvars, coeffs })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coefficients(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn coefficient(&self, i: usize) -> &Polynomial {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Applies the derivation to a polynomial: `X(f) = sum_i A_i df/dx_i`.
    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial, EngineError> {
        if f.nvars() != self.nvars {
            return Err(EngineError::DimensionMismatch { expected: self.nvars, got: f.nvars() });
        }
        let mut out = Polynomial::zero(self.nvars);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            out = &out + &(a * &f.derive(i)?);
        }
        Ok(out)
    }

    /// Lie bracket `[X, Y]`, the derivation with coefficients
    /// `X(B_i) - Y(A_i)`.
    pub fn lie_bracket(&self, other: &Derivation) -> Result<Derivation, EngineError> {
        if other.nvars != self.nvars {
            return Err(EngineError::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        let coeffs = (0..self.nvars)
            .map(|i| Ok(&self.apply(&other.coeffs[i])? - &other.apply(&self.coeffs[i])?))
            .collect::<Result<Vec<_>, EngineError>>()?;
        Ok(Derivation { nvars: self.nvars, coeffs })
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        assert_eq!(self.nvars, other.nvars, "derivation sum across contexts");
        Derivation {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Derivation) -> Derivation {
        assert_eq!(self.nvars, other.nvars, "derivation difference across contexts");
        Derivation {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Derivation {
        Derivation { nvars: self.nvars, coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn mul_polynomial(&self, f: &Polynomial) -> Derivation {
        Derivation { nvars: self.nvars, coeffs: self.coeffs.iter().map(|a| a * f).collect() }
    }

    /// Coefficient vector evaluated at a point.
    pub fn evaluate_at(&self, p: &Point) -> Result<Vec<Q>, EngineError> {
        self.coeffs.iter().map(|a| a.evaluate(p)).collect()
    }

    /// True when `X(x_var)` lies in the principal ideal `(x_var)`, i.e. the
    /// field is tangent to the coordinate hyperplane `{x_var = 0}`.
    pub fn is_tangent_to_hyperplane(&self, var: usize) -> bool {
        self.coeffs[var].in_variable_ideal(var)
    }

    /// Constant parts, linear-part matrix (row `i` = gradient of `A_i` at the
    /// origin), and whether any coefficient has degree-2-or-higher terms.
    pub(crate) fn linear_data(&self) -> (Vec<Q>, QMatrix, bool) {
        let mut consts = Vec::with_capacity(self.nvars);
        let mut rows = Vec::with_capacity(self.nvars);
        let mut higher = false;
        for a in &self.coeffs {
            let (c, lin, h) = a.linear_decomposition();
            consts.push(c);
            rows.push(lin);
            higher |= h;
        }
        (consts, QMatrix::from_rows(rows), higher)
    }

    pub(crate) fn to_modvec(&self) -> ModVec {
        ModVec::new(self.coeffs.clone())
    }

    /// Canonical text form: coefficients ascending by coordinate index,
    /// `z*d/dz` / `(z - x)*d/dx` pieces joined with signs.
    pub fn display(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.nvars, "display names mismatch context");
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, body) = polynomial_piece(c, names, &names[i]);
            if first {
                if neg {
                    out.push('-');
                }
                first = false;
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&body);
        }
        out
    }
}

/// Renders one coefficient-times-partial piece; the bool is an extracted
/// leading minus for join-time sign placement.
fn polynomial_piece(c: &Polynomial, names: &[String], dname: &str) -> (bool, String) {
    let d = format!("d/d{dname}");
    if c.num_terms() == 1 {
        let (m, q) = c.terms().next().expect("nonzero polynomial has a term");
        let neg = q.is_negative();
        let abs = q.abs();
        if m.is_one() && abs.is_one() {
            (neg, d)
        } else {
            let p = Polynomial::from_term(c.nvars(), m.clone(), abs);
            (neg, format!("{}*{}", p.display(names), d))
        }
    } else {
        (false, format!("({})*{}", c.display(names), d))
    }
}

/// Shapes a generator can take in a coordinate-aligned basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementaryKind {
    /// The zero field (redundant generator).
    Zero,
    /// A nonzero constant multiple of a single coordinate field `d/dx_i`.
    Partial { var: usize, scale: Q },
    /// A diagonal linear field `sum_j w_j x_j d/dx_j`.
    Diagonal { weights: Vec<Q> },
}

/// Classifies a generator as coordinate-aligned, or `None` if it is neither
/// a scaled partial nor a diagonal linear field.
pub fn classify_elementary(x: &Derivation) -> Option<ElementaryKind> {
    if x.is_zero() {
        return Some(ElementaryKind::Zero);
    }
    let nonzero: Vec<usize> =
        (0..x.nvars()).filter(|&i| !x.coefficient(i).is_zero()).collect();
    if nonzero.len() == 1 {
        let i = nonzero[0];
        if let Some(c) = x.coefficient(i).as_constant() {
            if !c.is_zero() {
                return Some(ElementaryKind::Partial { var: i, scale: c });
            }
        }
    }
    // Diagonal: every nonzero coefficient i is a rational multiple of x_i.
    let mut weights = vec![Q::zero(); x.nvars()];
    for &i in &nonzero {
        let c = x.coefficient(i);
        if c.num_terms() != 1 {
            return None;
        }
        let (m, q) = c.terms().next().expect("nonzero coefficient");
        if m.pairs() != [(i, 1)] {
            return None;
        }
        weights[i] = q.clone();
    }
    Some(ElementaryKind::Diagonal { weights })
}

/// Checks that every listed generator is coordinate-aligned; on failure
/// returns the index of the first generator that is not.
pub fn check_monomial_basis(gens: &[Derivation]) -> Result<(), usize> {
    for (k, g) in gens.iter().enumerate() {
        if classify_elementary(g).is_none() {
            return Err(k);
        }
    }
    Ok(())
}

/// Checks closure under Lie brackets: every `[X_i, X_j]` must lie in the
/// module generated by the `X_k` over the polynomial ring. Returns the first
/// failing pair, or `None` when involutive.
pub fn check_involutive(gens: &[Derivation]) -> Result<Option<(usize, usize)>, EngineError> {
    let vecs: Vec<ModVec> = gens.iter().map(Derivation::to_modvec).collect();
    for j in 1..gens.len() {
        for i in 0..j {
            let bracket = gens[i].lie_bracket(&gens[j])?;
            if bracket.is_zero() {
                continue;
            }
            if module_membership(&bracket.to_modvec(), &vecs).is_none() {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// A singular distribution presented by a finite generator list together with
/// its declared leaf dimension `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    generators: Vec<Derivation>,
    leaf_dimension: usize,
}

impl Distribution {
    /// Builds a distribution; the generator list must be nonempty, share one
    /// variable context, and declare `1 <= d <= nvars`.
    pub fn new(generators: Vec<Derivation>, leaf_dimension: usize) -> Result<Self, EngineError> {
        let first = generators
            .first()
            .ok_or_else(|| EngineError::Precondition("distribution needs at least one generator".into()))?;
        let nvars = first.nvars();
        for g in &generators {
            if g.nvars() != nvars {
                return Err(EngineError::DimensionMismatch {
                    expected: nvars,
                    got: g.nvars(),
                });
            }
        }
        if leaf_dimension == 0 || leaf_dimension > nvars {
            return Err(EngineError::Precondition(format!(
                "leaf dimension {leaf_dimension} out of range for {nvars} variables"
            )));
        }
        Ok(Distribution {
            generators,
            leaf_dimension,
        })
    }

    pub fn nvars(&self) -> usize {
        self.generators[0].nvars()
    }

    pub fn generators(&self) -> &[Derivation] {
        &self.generators
    }

    pub fn leaf_dimension(&self) -> usize {
        self.leaf_dimension
    }
}

/// An invertible affine change `x_new = S (x_old - p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateChange {
    matrix: QMatrix,
    inverse: QMatrix,
    translation: Vec<Q>,
}

impl CoordinateChange {
    pub fn new(matrix: Vec<Vec<Q>>, translation: Vec<Q>) -> Result<Self, EngineError> {
        let n = translation.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(EngineError::InvalidChange(format!(
                "change matrix must be {n}x{n} to match the translation"
            )));
        }
        let m = QMatrix::from_rows(matrix);
        let inverse = m
            .inverse()
            .ok_or_else(|| EngineError::InvalidChange("change matrix is singular".to_string()))?;
        Ok(CoordinateChange { matrix: m, inverse, translation })
    }

    pub fn identity(nvars: usize) -> Self {
        CoordinateChange {
            matrix: QMatrix::identity(nvars),
            inverse: QMatrix::identity(nvars),
            translation: vec![Q::zero(); nvars],
        }
    }

    pub fn nvars(&self) -> usize {
        self.translation.len()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == QMatrix::identity(self.nvars())
            && self.translation.iter().all(|c| c.is_zero())
    }

    pub fn matrix_rows(&self) -> Vec<Vec<Q>> {
        (0..self.nvars()).map(|i| self.matrix.row(i).to_vec()).collect()
    }

    pub fn translation(&self) -> &[Q] {
        &self.translation
    }

    /// Expressions of the old coordinates in the new ones:
    /// `x_i = sum_j Sinv[i][j] y_j + p_i`.
    pub fn old_in_new(&self) -> Vec<Polynomial> {
        let n = self.nvars();
        (0..n)
            .map(|i| {
                let mut f = Polynomial::constant(n, self.translation[i].clone());
                for j in 0..n {
                    let c = self.inverse.at(i, j);
                    if !c.is_zero() {
                        f = &f
                            + &Polynomial::var(n, j)
                                .expect("index in range")
                                .scale(c);
                    }
                }
                f
            })
            .collect()
    }

    /// Expressions of the new coordinates in the old ones:
    /// `y_k = sum_i S[k][i] (x_i - p_i)`.
    pub fn new_in_old(&self) -> Vec<Polynomial> {
        let n = self.nvars();
        (0..n)
            .map(|k| {
                let mut f = Polynomial::zero(n);
                for i in 0..n {
                    let c = self.matrix.at(k, i);
                    if !c.is_zero() {
                        let xi = Polynomial::var(n, i).expect("index in range");
                        let shifted =
                            &xi - &Polynomial::constant(n, self.translation[i].clone());
                        f = &f + &shifted.scale(c);
                    }
                }
                f
            })
            .collect()
    }

    /// Rewrites a polynomial in the new coordinates.
    pub fn apply_to_polynomial(&self, f: &Polynomial) -> Result<Polynomial, EngineError> {
        f.substitute(&self.old_in_new(), self.nvars())
    }

    /// Rewrites a derivation in the new coordinates: the new coefficient at
    /// position `k` is `X(y_k)` expressed in the new coordinates.
    pub fn apply_to_derivation(&self, x: &Derivation) -> Result<Derivation, EngineError> {
        let news = self.new_in_old();
        let old_in_new = self.old_in_new();
        let coeffs = news
            .iter()
            .map(|yk| x.apply(yk)?.substitute(&old_in_new, self.nvars()))
            .collect::<Result<Vec<_>, _>>()?;
        Derivation::new(coeffs)
    }

    pub fn apply_to_point(&self, p: &Point) -> Point {
        let shifted: Vec<Q> =
            p.coords().iter().zip(&self.translation).map(|(x, t)| x - t).collect();
        Point(self.matrix.mul_vec(&shifted))
    }

    /// The change mapping the new coordinates back to the old ones.
    pub fn inverse_change(&self) -> CoordinateChange {
        let q = self.matrix.mul_vec(&self.translation).iter().map(|c| -c).collect();
        CoordinateChange {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
            translation: q,
        }
    }
}

/// Why a distribution could not be brought to coordinate-aligned form by an
/// invertible affine change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationObstruction {
    NilpotentLinearPart,
    NonRationalEigenvalues,
    NotDiagonalizable,
    NoCommonTranslation,
    NonvanishingRemainder,
}

impl fmt::Display for NormalizationObstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NormalizationObstruction::NilpotentLinearPart => "nilpotent linear part",
            NormalizationObstruction::NonRationalEigenvalues => "non-rational eigenvalues",
            NormalizationObstruction::NotDiagonalizable => "not diagonalizable",
            NormalizationObstruction::NoCommonTranslation => "no common translation",
            NormalizationObstruction::NonvanishingRemainder => "nonvanishing remainder",
        };
        f.write_str(s)
    }
}

/// A successful normalization: the affine change and the generators
/// rewritten through it.
#[derive(Debug, Clone)]
pub struct MonomializeOutcome {
    pub change: CoordinateChange,
    pub transformed: Vec<Derivation>,
    /// True when the input was already coordinate-aligned (identity change).
    pub already_normal: bool,
}

/// Attempts to bring all generators to coordinate-aligned form by one
/// invertible affine change `y = S (x - p)`.
///
/// The translation kills constant parts of generators with nonzero linear
/// part; `S` diagonalizes the linear part of the first such generator over
/// the rationals (rows are left eigenvectors, grouped by ascending
/// eigenvalue). Pure constant fields are sent to coordinate partials
/// directly. The result is certified by re-checking every transformed
/// generator; any residue fails with `NonvanishingRemainder`.
pub fn monomialize_linear(
    gens: &[Derivation],
) -> Result<MonomializeOutcome, NormalizationObstruction> {
    assert!(!gens.is_empty(), "normalization needs at least one generator");
    let n = gens[0].nvars();
    if check_monomial_basis(gens).is_ok() {
        return Ok(MonomializeOutcome {
            change: CoordinateChange::identity(n),
            transformed: gens.to_vec(),
            already_normal: true,
        });
    }
    let data: Vec<(Vec<Q>, QMatrix, bool)> = gens.iter().map(Derivation::linear_data).collect();
    let with_linear: Vec<usize> = (0..gens.len()).filter(|&g| !data[g].1.is_zero()).collect();

    let change = if with_linear.is_empty() {
        let pure_constant = data.iter().all(|(_, _, higher)| !higher);
        if !pure_constant {
            // Zero linear part with higher-order residue: the linear part is
            // (trivially) nilpotent and no affine change can help.
            return Err(NormalizationObstruction::NilpotentLinearPart);
        }
        constant_field_change(n, &data)?
    } else {
        // Common translation: L_g p = -a_g for every generator with L_g != 0.
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for &g in &with_linear {
            let (a, l, _) = &data[g];
            for i in 0..n {
                rows.push(l.row(i).to_vec());
                rhs.push(-a[i].clone());
            }
        }
        let p = QMatrix::from_rows(rows)
            .solve(&rhs)
            .ok_or(NormalizationObstruction::NoCommonTranslation)?;
        let l = &data[with_linear[0]].1;
        let s = diagonalizing_rows(l)?;
        CoordinateChange::new(s, p).expect("eigenbasis rows are invertible")
    };

    let transformed = gens
        .iter()
        .map(|g| change.apply_to_derivation(g).expect("affine change preserves context"))
        .collect::<Vec<_>>();
    if check_monomial_basis(&transformed).is_err() {
        return Err(NormalizationObstruction::NonvanishingRemainder);
    }
    Ok(MonomializeOutcome { change, transformed, already_normal: false })
}

/// Left-eigenvector rows of `l`, grouped by ascending eigenvalue, from the
/// canonical null-space bases of `l^T - lambda I`.
fn diagonalizing_rows(l: &QMatrix) -> Result<Vec<Vec<Q>>, NormalizationObstruction> {
    let n = l.rows();
    let cp = l.char_poly();
    let roots = rational_roots_with_multiplicity(&cp)
        .ok_or(NormalizationObstruction::NonRationalEigenvalues)?;
    let total: usize = roots.iter().map(|(_, m)| m).sum();
    if total < n {
        return Err(NormalizationObstruction::NonRationalEigenvalues);
    }
    if roots.iter().all(|(r, _)| r.is_zero()) {
        // All eigenvalues vanish while l itself does not.
        return Err(NormalizationObstruction::NilpotentLinearPart);
    }
    let lt = l.transpose();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for (lambda, _) in &roots {
        let shifted = lt.add(&QMatrix::identity(n).scale(&-lambda.clone()));
        let basis = shifted.null_space_basis();
        rows.extend(basis);
    }
    if rows.len() != n {
        return Err(NormalizationObstruction::NotDiagonalizable);
    }
    Ok(rows)
}

/// Change sending pure constant fields to coordinate partials: a maximal
/// independent family of constant vectors becomes the first unit vectors.
fn constant_field_change(
    n: usize,
    data: &[(Vec<Q>, QMatrix, bool)],
) -> Result<CoordinateChange, NormalizationObstruction> {
    let mut columns: Vec<Vec<Q>> = Vec::new();
    for (a, _, _) in data {
        if a.iter().all(|c| c.is_zero()) {
            continue;
        }
        let mut trial = columns.clone();
        trial.push(a.clone());
        if rank_of_columns(n, &trial) == trial.len() {
            columns = trial;
        }
    }
    if columns.is_empty() {
        return Err(NormalizationObstruction::NilpotentLinearPart);
    }
    for i in 0..n {
        if columns.len() == n {
            break;
        }
        let mut unit = vec![Q::zero(); n];
        unit[i] = Q::one();
        let mut trial = columns.clone();
        trial.push(unit);
        if rank_of_columns(n, &trial) == trial.len() {
            columns = trial;
        }
    }
    let t = QMatrix::from_rows(
        (0..n).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect(),
    );
    let s = t.inverse().ok_or(NormalizationObstruction::NotDiagonalizable)?;
    let rows = (0..n).map(|i| s.row(i).to_vec()).collect();
    CoordinateChange::new(rows, vec![Q::zero(); n])
        .map_err(|_| NormalizationObstruction::NotDiagonalizable)
}

fn rank_of_columns(n: usize, cols: &[Vec<Q>]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    QMatrix::from_rows(
        (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect(),
    )
    .rank()
}

/// A vector field whose coefficients may carry poles along designated
/// coordinate hyperplanes (as produced by pulling fields back through a
/// substitution with an exceptional divisor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentDerivation {
    nvars: usize,
    coeffs: Vec<LaurentPolynomial>,
}

impl LaurentDerivation {
    pub fn new(coeffs: Vec<LaurentPolynomial>) -> Result<Self, EngineError> {
        if coeffs.is_empty() {
            return Err(EngineError::Precondition(
                "a derivation needs at least one coordinate".to_string(),
            ));
        }
        let nvars = coeffs.len();
        for c in &coeffs {
            if c.nvars() != nvars {
                return Err(EngineError::DimensionMismatch { expected: nvars, got: c.nvars() });
            }
        }
        Ok(LaurentDerivation { nvars, coeffs })
    }

    pub fn from_derivation(x: &Derivation) -> Self {
        LaurentDerivation {
            nvars: x.nvars(),
            coeffs: x
                .coefficients()
                .iter()
                .map(|c| LaurentPolynomial::from_polynomial(c.clone()))
                .collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coefficients(&self) -> &[LaurentPolynomial] {
        &self.coeffs
    }

    pub fn coefficient(&self, i: usize) -> &LaurentPolynomial {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn apply(&self, f: &Polynomial) -> Result<LaurentPolynomial, EngineError> {
        if f.nvars() != self.nvars {
            return Err(EngineError::DimensionMismatch { expected: self.nvars, got: f.nvars() });
        }
        let mut out = LaurentPolynomial::zero(self.nvars);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            out = out.add(&a.mul_polynomial(&f.derive(i)?));
        }
        Ok(out)
    }

    pub fn is_analytic(&self) -> bool {
        self.coeffs.iter().all(LaurentPolynomial::is_polynomial)
    }

    pub fn to_derivation(&self) -> Result<Derivation, EngineError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.clone().into_polynomial())
            .collect::<Result<Vec<_>, _>>()?;
        Derivation::new(coeffs)
    }

    pub fn mul_variable(&self, var: usize) -> LaurentDerivation {
        LaurentDerivation {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|c| c.mul_variable(var)).collect(),
        }
    }

    pub fn mul_polynomial(&self, f: &Polynomial) -> LaurentDerivation {
        LaurentDerivation {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|c| c.mul_polynomial(f)).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> LaurentDerivation {
        LaurentDerivation {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn max_pole_order(&self, var: usize) -> u32 {
        self.coeffs.iter().map(|c| c.pole_order(var)).max().unwrap_or(0)
    }

    pub fn display(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.nvars, "display names mismatch context");
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, body) = laurent_piece(c, names, &names[i]);
            if first {
                if neg {
                    out.push('-');
                }
                first = false;
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&body);
        }
        out
    }
}

fn laurent_piece(c: &LaurentPolynomial, names: &[String], dname: &str) -> (bool, String) {
    if c.is_polynomial() {
        return polynomial_piece(c.numerator(), names, dname);
    }
    if c.numerator().num_terms() == 1 {
        let (m, q) = c.numerator().terms().next().expect("nonzero numerator");
        let neg = q.is_negative();
        let abs_num = Polynomial::from_term(c.nvars(), m.clone(), q.abs());
        let abs = LaurentPolynomial::new(abs_num, c.poles().clone());
        (neg, format!("({})*d/d{}", abs.display(names), dname))
    } else {
        (false, format!("({})*d/d{}", c.display(names), dname))
    }
}
