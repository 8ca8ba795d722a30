//! Blowup chart maps and the transforms they induce: total and controlled
//! transforms of ideals, meromorphic pullbacks of derivations, adapted
//! strict transforms for certified centers, and syzygy-generated closure
//! fields.

use crate::admissibility::TransverseSplit;
use crate::derivation::{Derivation, LaurentDerivation};
use crate::error::EngineError;
use crate::ideal::Ideal;
use crate::laurent::LaurentPolynomial;
use crate::modvec::{module_membership, syzygy_basis, ModVec};
use crate::poly::Polynomial;

/// A coordinate-subspace blowup center `V(x_{i_1}, ..., x_{i_t})` in the
/// current chart coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupCenter {
    nvars: usize,
    variables: Vec<usize>,
}

impl BlowupCenter {
    /// Builds a center from the listed variable indices (sorted and
    /// deduplicated); the list must be nonempty and in range.
    pub fn new(nvars: usize, mut variables: Vec<usize>) -> Result<Self, EngineError> {
        if variables.is_empty() {
            return Err(EngineError::Precondition(
                "blowup center needs at least one variable".into(),
            ));
        }
        variables.sort_unstable();
        variables.dedup();
        for &v in &variables {
            if v >= nvars {
                return Err(EngineError::IndexOutOfRange { index: v, nvars });
            }
        }
        Ok(BlowupCenter { nvars, variables })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn contains(&self, var: usize) -> bool {
        self.variables.binary_search(&var).is_ok()
    }

    /// Codimension of the center (number of defining variables).
    pub fn codimension(&self) -> usize {
        self.variables.len()
    }

    /// The center ideal `(x_{i_1}, ..., x_{i_t})`.
    pub fn ideal(&self) -> Ideal {
        let gens = self
            .variables
            .iter()
            .map(|&v| Polynomial::var(self.nvars, v).expect("index validated"))
            .collect();
        Ideal::new(self.nvars, gens).expect("context validated")
    }
}

/// One affine chart of a blowup: `x_j -> x_c * x_j` for the other center
/// variables, identity elsewhere; `x_c` becomes the exceptional equation in
/// the target chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartMap {
    center: BlowupCenter,
    chart: usize,
}

/// Builds the chart map for the given chart variable of the center.
pub fn blowup_chart(center: &BlowupCenter, chart: usize) -> Result<ChartMap, EngineError> {
    if !center.contains(chart) {
        return Err(EngineError::ChartVariableNotInCenter {
            var: chart.to_string(),
        });
    }
    Ok(ChartMap {
        center: center.clone(),
        chart,
    })
}

impl ChartMap {
    pub fn center(&self) -> &BlowupCenter {
        &self.center
    }

    pub fn chart_variable(&self) -> usize {
        self.chart
    }

    pub fn nvars(&self) -> usize {
        self.center.nvars()
    }

    /// Images of the source variables under the chart substitution.
    pub fn substitution(&self) -> Vec<Polynomial> {
        let n = self.nvars();
        let xc = Polynomial::var(n, self.chart).expect("index validated");
        (0..n)
            .map(|j| {
                let xj = Polynomial::var(n, j).expect("index in range");
                if j != self.chart && self.center.contains(j) {
                    &xj * &xc
                } else {
                    xj
                }
            })
            .collect()
    }

    /// Substitutes the chart map into a polynomial.
    pub fn pull_polynomial(&self, f: &Polynomial) -> Result<Polynomial, EngineError> {
        f.substitute(&self.substitution(), self.nvars())
    }
}

/// The total transform: every generator substituted through the chart map.
pub fn total_transform_ideal(ideal: &Ideal, m: &ChartMap) -> Result<Ideal, EngineError> {
    if ideal.nvars() != m.nvars() {
        return Err(EngineError::DimensionMismatch {
            expected: m.nvars(),
            got: ideal.nvars(),
        });
    }
    let gens = ideal
        .generators()
        .iter()
        .map(|f| m.pull_polynomial(f))
        .collect::<Result<Vec<_>, _>>()?;
    Ideal::new(ideal.nvars(), gens)
}

/// The controlled transform: each pulled-back generator exactly divided once
/// by the exceptional variable. Requires the center inside `V(I)` (every
/// generator of `I` in the center ideal).
pub fn controlled_transform_ideal(ideal: &Ideal, m: &ChartMap) -> Result<Ideal, EngineError> {
    if ideal.nvars() != m.nvars() {
        return Err(EngineError::DimensionMismatch {
            expected: m.nvars(),
            got: ideal.nvars(),
        });
    }
    let center_ideal = m.center().ideal();
    for (i, f) in ideal.generators().iter().enumerate() {
        if !center_ideal.contains(f)? {
            return Err(EngineError::OrderOneViolation(format!(
                "generator {i} of the ideal does not lie in the center ideal"
            )));
        }
    }
    let c = m.chart_variable();
    let gens = ideal
        .generators()
        .iter()
        .map(|f| {
            m.pull_polynomial(f)?
                .exact_divide_by_variable(c, 1)
                .map_err(|_| {
                    EngineError::OrderOneViolation(
                        "pulled-back generator is not divisible by the exceptional variable"
                            .into(),
                    )
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ideal::new(ideal.nvars(), gens)
}

/// The unique meromorphic derivation `X*` with `X*(σ*f) = σ*(X(f))`,
/// computed through the chain rule on chart coordinates:
/// `X*(x_c) = σ*X(x_c)` and, for the other center variables,
/// `X*(x_j) = (σ*X(x_j) - x_j · σ*X(x_c)) / x_c`.
pub fn pullback_derivation(
    x: &Derivation,
    m: &ChartMap,
) -> Result<LaurentDerivation, EngineError> {
    let n = m.nvars();
    if x.nvars() != n {
        return Err(EngineError::DimensionMismatch {
            expected: n,
            got: x.nvars(),
        });
    }
    let c = m.chart_variable();
    let pulled_ac = m.pull_polynomial(x.coefficient(c))?;
    let mut coeffs = Vec::with_capacity(n);
    for j in 0..n {
        if j == c {
            coeffs.push(LaurentPolynomial::from_polynomial(pulled_ac.clone()));
        } else if m.center().contains(j) {
            let pulled_aj = m.pull_polynomial(x.coefficient(j))?;
            let xj = Polynomial::var(n, j).expect("index in range");
            let numerator = &pulled_aj - &(&xj * &pulled_ac);
            coeffs.push(LaurentPolynomial::quotient_by_variable(numerator, c, 1));
        } else {
            coeffs.push(LaurentPolynomial::from_polynomial(
                m.pull_polynomial(x.coefficient(j))?,
            ));
        }
    }
    LaurentDerivation::new(coeffs)
}

/// Which certificate justifies the adapted strict transform.
#[derive(Debug, Clone, Copy)]
pub enum CenterKind<'a> {
    /// The center ideal was certified invariant under the listed generators:
    /// every pullback must be analytic and the transform is the total one.
    Invariant(&'a [Derivation]),
    /// The center was certified admissible with a constructed
    /// transverse/invariant split.
    Split(&'a TransverseSplit),
}

/// The adapted strict transform for a certified center: exceptional-scaled
/// pullbacks of the transverse generators plus plain pullbacks of the
/// invariant-side generators, each verified analytic and tangent to every
/// listed divisor variable.
pub fn adapted_strict_transform(
    kind: CenterKind<'_>,
    m: &ChartMap,
    log_variables: &[usize],
) -> Result<Vec<Derivation>, EngineError> {
    let c = m.chart_variable();
    let mut out = Vec::new();
    match kind {
        CenterKind::Invariant(gens) => {
            for (i, g) in gens.iter().enumerate() {
                let pulled = pullback_derivation(g, m)?;
                if !pulled.is_analytic() {
                    return Err(EngineError::PoleObstruction(format!(
                        "pullback of invariant-center generator {i} keeps a pole"
                    )));
                }
                out.push(pulled.to_derivation()?);
            }
        }
        CenterKind::Split(split) => {
            for (i, y) in split.transverse().iter().enumerate() {
                let scaled = pullback_derivation(y, m)?.mul_variable(c);
                if !scaled.is_analytic() {
                    return Err(EngineError::PoleObstruction(format!(
                        "exceptional-scaled pullback of transverse generator {i} is not analytic"
                    )));
                }
                out.push(scaled.to_derivation()?);
            }
            for (j, z) in split.invariant_side().iter().enumerate() {
                let pulled = pullback_derivation(z, m)?;
                if !pulled.is_analytic() {
                    return Err(EngineError::PoleObstruction(format!(
                        "pullback of invariant-side generator {j} keeps a pole"
                    )));
                }
                out.push(pulled.to_derivation()?);
            }
        }
    }
    for (i, g) in out.iter().enumerate() {
        for &v in log_variables {
            if !g.is_tangent_to_hyperplane(v) {
                return Err(EngineError::TangencyObstruction(format!(
                    "transformed generator {i} is not tangent to the divisor x_{v} = 0"
                )));
            }
        }
    }
    Ok(out)
}

/// Closure fields from relations: clears each meromorphic input by the
/// exceptional variable, computes the syzygies of the cleared fields
/// restricted to the exceptional hypersurface, divides each syzygy
/// combination back by the exceptional variable, and keeps the results that
/// enlarge the module spanned by the cleared fields and the already-analytic
/// inputs.
pub fn strict_closure_syzygies(
    inputs: &[LaurentDerivation],
    m: &ChartMap,
) -> Result<Vec<Derivation>, EngineError> {
    let n = m.nvars();
    let c = m.chart_variable();
    let mut cleared = Vec::new();
    let mut module_vecs = Vec::new();
    for (i, x) in inputs.iter().enumerate() {
        if x.nvars() != n {
            return Err(EngineError::DimensionMismatch {
                expected: n,
                got: x.nvars(),
            });
        }
        if x.max_pole_order(c) > 1 {
            return Err(EngineError::PoleObstruction(format!(
                "input {i} has pole order {} in the exceptional variable",
                x.max_pole_order(c)
            )));
        }
        let scaled = x.mul_variable(c);
        if !scaled.is_analytic() {
            return Err(EngineError::PoleObstruction(format!(
                "input {i} has a pole outside the exceptional variable"
            )));
        }
        let y = scaled.to_derivation()?;
        module_vecs.push(y.to_modvec());
        cleared.push(y);
    }
    for x in inputs {
        if x.is_analytic() {
            module_vecs.push(x.to_derivation()?.to_modvec());
        }
    }
    let restricted: Vec<ModVec> = cleared
        .iter()
        .map(|y| {
            ModVec::new(
                y.coefficients()
                    .iter()
                    .map(|p| p.restrict_var_to_zero(c))
                    .collect(),
            )
        })
        .collect();
    let mut out = Vec::new();
    for relation in syzygy_basis(&restricted) {
        let mut combo = Derivation::zero(n);
        for (f, y) in relation.iter().zip(&cleared) {
            combo = combo.add(&y.mul_polynomial(f));
        }
        if combo.is_zero() {
            continue;
        }
        let coeffs = combo
            .coefficients()
            .iter()
            .map(|p| p.exact_divide_by_variable(c, 1))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| {
                EngineError::Internal(
                    "syzygy combination of cleared pullbacks is not divisible by the exceptional variable"
                        .into(),
                )
            })?;
        let w = Derivation::new(coeffs)?;
        if w.is_zero() {
            continue;
        }
        if module_membership(&w.to_modvec(), &module_vecs).is_none() {
            module_vecs.push(w.to_modvec());
            out.push(w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q_int, Point};

    fn pvar(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i).unwrap()
    }

    fn point_blowup(n: usize) -> ChartMap {
        let center = BlowupCenter::new(n, (0..n).collect()).unwrap();
        blowup_chart(&center, n - 1).unwrap()
    }

    #[test]
    fn chart_substitution_shapes() {
        let n = 3;
        let m = point_blowup(n);
        let images = m.substitution();
        assert_eq!(images[0], &pvar(n, 0) * &pvar(n, 2));
        assert_eq!(images[1], &pvar(n, 1) * &pvar(n, 2));
        assert_eq!(images[2], pvar(n, 2));

        let curve = BlowupCenter::new(3, vec![0, 1]).unwrap();
        let mx = blowup_chart(&curve, 0).unwrap();
        let images = mx.substitution();
        assert_eq!(images[0], pvar(3, 0));
        assert_eq!(images[1], &pvar(3, 1) * &pvar(3, 0));
        assert_eq!(images[2], pvar(3, 2));

        assert!(matches!(
            blowup_chart(&curve, 2),
            Err(EngineError::ChartVariableNotInCenter { .. })
        ));
    }

    #[test]
    fn total_transform_of_point_ideal() {
        let n = 3;
        let m = point_blowup(n);
        let ixy = Ideal::new(n, vec![pvar(n, 0), pvar(n, 1)]).unwrap();
        let total = total_transform_ideal(&ixy, &m).unwrap();
        let expected = Ideal::new(
            n,
            vec![&pvar(n, 0) * &pvar(n, 2), &pvar(n, 1) * &pvar(n, 2)],
        )
        .unwrap();
        assert_eq!(total.generators(), expected.generators());

        let unit = Ideal::unit(n);
        assert!(total_transform_ideal(&unit, &m).unwrap().is_unit_ideal());

        let iz = Ideal::new(n, vec![pvar(n, 2)]).unwrap();
        let total = total_transform_ideal(&iz, &m).unwrap();
        assert_eq!(total.generators(), &[pvar(n, 2)]);
    }

    #[test]
    fn controlled_transform_divides_once() {
        let n = 3;
        let m = point_blowup(n);
        let ixy = Ideal::new(n, vec![pvar(n, 0), pvar(n, 1)]).unwrap();
        let controlled = controlled_transform_ideal(&ixy, &m).unwrap();
        assert_eq!(controlled.generators(), &[pvar(n, 0), pvar(n, 1)]);

        let off_center = Ideal::new(n, vec![&pvar(n, 0) + &Polynomial::one(n)]).unwrap();
        assert!(matches!(
            controlled_transform_ideal(&off_center, &m),
            Err(EngineError::OrderOneViolation(_))
        ));

        let curve = BlowupCenter::new(3, vec![0, 1]).unwrap();
        let mx = blowup_chart(&curve, 0).unwrap();
        let ix = Ideal::new(3, vec![pvar(3, 0)]).unwrap();
        let controlled = controlled_transform_ideal(&ix, &mx).unwrap();
        assert!(controlled.is_unit_ideal());
    }

    #[test]
    fn pullback_matches_chart_formulas() {
        // X = d/dz + z d/dx through the z-chart of the point blowup.
        let n = 3;
        let m = point_blowup(n);
        let x = Derivation::new(vec![pvar(n, 2), Polynomial::zero(n), Polynomial::one(n)]).unwrap();
        let pulled = pullback_derivation(&x, &m).unwrap();
        // coefficient of d/dx: (z - x)/z = 1 - x/z
        let num = &pvar(n, 2) - &pvar(n, 0);
        assert_eq!(
            pulled.coefficient(0),
            &LaurentPolynomial::quotient_by_variable(num, 2, 1)
        );
        // coefficient of d/dy: -y/z
        assert_eq!(
            pulled.coefficient(1),
            &LaurentPolynomial::quotient_by_variable(-&pvar(n, 1), 2, 1)
        );
        // coefficient of d/dz: 1
        assert_eq!(
            pulled.coefficient(2),
            &LaurentPolynomial::from_polynomial(Polynomial::one(n))
        );
        assert_eq!(pulled.max_pole_order(2), 1);
    }

    #[test]
    fn pullback_of_euler_field_stays_analytic() {
        let n = 2;
        let center = BlowupCenter::new(n, vec![0, 1]).unwrap();
        let mx = blowup_chart(&center, 0).unwrap();
        let euler = Derivation::new(vec![pvar(n, 0), pvar(n, 1)]).unwrap();
        let pulled = pullback_derivation(&euler, &mx).unwrap();
        assert!(pulled.is_analytic());
        let back = pulled.to_derivation().unwrap();
        assert_eq!(back.coefficient(0), &pvar(n, 0));
        assert!(back.coefficient(1).is_zero());
    }

    #[test]
    fn pullback_satisfies_defining_identity() {
        // X*(σ*f) = σ*(X(f)) for a handful of polynomials.
        let n = 3;
        let m = point_blowup(n);
        let x = Derivation::new(vec![
            &pvar(n, 1) + &Polynomial::one(n),
            &pvar(n, 0) * &pvar(n, 2),
            pvar(n, 1),
        ])
        .unwrap();
        let pulled = pullback_derivation(&x, &m).unwrap();
        let samples = [
            pvar(n, 0),
            &pvar(n, 1) * &pvar(n, 2),
            &(&pvar(n, 0) * &pvar(n, 0)) + &pvar(n, 2),
        ];
        for f in &samples {
            let lhs = pulled.apply(&m.pull_polynomial(f).unwrap()).unwrap();
            let rhs = LaurentPolynomial::from_polynomial(
                m.pull_polynomial(&x.apply(f).unwrap()).unwrap(),
            );
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn invariant_center_transform_is_analytic_pullback() {
        let n = 2;
        let center = BlowupCenter::new(n, vec![0, 1]).unwrap();
        let mx = blowup_chart(&center, 0).unwrap();
        let euler = Derivation::new(vec![pvar(n, 0), pvar(n, 1)]).unwrap();
        let out = adapted_strict_transform(CenterKind::Invariant(&[euler]), &mx, &[0]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].coefficient(0), &pvar(n, 0));
        assert!(out[0].coefficient(1).is_zero());

        // A non-invariant field leaves a pole and is rejected.
        let dx = Derivation::partial(n, 0).unwrap();
        assert!(matches!(
            adapted_strict_transform(CenterKind::Invariant(&[dx]), &mx, &[0]),
            Err(EngineError::PoleObstruction(_))
        ));
    }

    #[test]
    fn syzygy_closure_recovers_straight_field() {
        // Inputs (1/x)(x d/dx - v d/dv) and (1/x) d/dv over the x-chart of
        // the blowup of V(x, v) in 3 variables: the relation (1, v) of the
        // restrictions yields d/dx.
        let n = 3;
        let center = BlowupCenter::new(n, vec![0, 1]).unwrap();
        let mx = blowup_chart(&center, 0).unwrap();
        let dx = Derivation::partial(n, 0).unwrap();
        let dv = Derivation::partial(n, 1).unwrap();
        let y1 = pullback_derivation(&dx, &mx).unwrap();
        let y2 = pullback_derivation(&dv, &mx).unwrap();
        let out = strict_closure_syzygies(&[y1, y2], &mx).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], Derivation::partial(n, 0).unwrap());

        // A single meromorphic input has no relations.
        let alone = pullback_derivation(&dx, &mx).unwrap();
        assert!(strict_closure_syzygies(&[alone], &mx).unwrap().is_empty());
    }

    #[test]
    fn syzygy_closure_empty_for_wider_center() {
        // Center codimension exceeds the transverse count: V(x, y, z) in 3
        // variables with the single field d/dx pulled through the z-chart.
        let n = 3;
        let m = point_blowup(n);
        let dx = Derivation::partial(n, 0).unwrap();
        let pulled = pullback_derivation(&dx, &m).unwrap();
        assert!(strict_closure_syzygies(&[pulled], &m).unwrap().is_empty());
    }

    #[test]
    fn transforms_preserve_origin_evaluation() {
        // The z-chart origin maps to the center; pulled-back functions of
        // the center vanish there.
        let n = 3;
        let m = point_blowup(n);
        let f = &pvar(n, 0) + &pvar(n, 1);
        let pulled = m.pull_polynomial(&f).unwrap();
        let origin = Point::origin(n);
        assert_eq!(pulled.evaluate(&origin).unwrap(), q_int(0));
    }
}
