//! Invariant machinery for a distribution acting on an ideal: generalized
//! k-Fitting ideals, invariance and transversality predicates, tangency
//! chains with their pointwise order and type, and differential closures.

use itertools::Itertools;

use crate::derivation::{Derivation, Distribution};
use crate::error::EngineError;
use crate::ideal::Ideal;
use crate::poly::{Point, Polynomial};

/// Determinant of a nonempty square polynomial matrix by Laplace expansion
/// along the first row.
pub(crate) fn poly_det(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    debug_assert!(n > 0 && m.iter().all(|row| row.len() == n));
    if n == 1 {
        return m[0][0].clone();
    }
    let nvars = m[0][0].nvars();
    let mut acc = Polynomial::zero(nvars);
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let cofactor = entry * &poly_det(&minor);
        if j % 2 == 0 {
            acc = &acc + &cofactor;
        } else {
            acc = &acc - &cofactor;
        }
    }
    acc
}

/// The matrix `[X_i(f_j)]` of the listed derivations applied to the listed
/// ideal generators (rows indexed by derivations).
pub(crate) fn application_matrix(
    gens: &[Derivation],
    ideal: &Ideal,
) -> Result<Vec<Vec<Polynomial>>, EngineError> {
    gens.iter()
        .map(|x| ideal.generators().iter().map(|f| x.apply(f)).collect())
        .collect()
}

/// The ideal of all `k`-by-`k` minors of a polynomial matrix, with zero
/// minors dropped; `k` larger than either matrix dimension gives the zero
/// ideal, and `k = 0` gives the unit ideal (empty determinant).
pub(crate) fn minor_ideal(
    matrix: &[Vec<Polynomial>],
    nvars: usize,
    k: usize,
) -> Result<Ideal, EngineError> {
    if k == 0 {
        return Ok(Ideal::unit(nvars));
    }
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    if k > rows || k > cols {
        return Ok(Ideal::zero(nvars));
    }
    let mut minors = Vec::new();
    for rsel in (0..rows).combinations(k) {
        for csel in (0..cols).combinations(k) {
            let sub: Vec<Vec<Polynomial>> = rsel
                .iter()
                .map(|&i| csel.iter().map(|&j| matrix[i][j].clone()).collect())
                .collect();
            minors.push(poly_det(&sub));
        }
    }
    Ideal::new(nvars, minors)
}

/// The generalized k-Fitting ideal: all `k`-by-`k` minors of `[X_i(f_j)]`
/// over the listed generators of the distribution and the ideal.
pub fn fitting_ideal(gens: &[Derivation], ideal: &Ideal, k: usize) -> Result<Ideal, EngineError> {
    let nvars = ideal.nvars();
    for g in gens {
        if g.nvars() != nvars {
            return Err(EngineError::DimensionMismatch {
                expected: nvars,
                got: g.nvars(),
            });
        }
    }
    let matrix = application_matrix(gens, ideal)?;
    minor_ideal(&matrix, nvars, k)
}

/// Whether the ideal is invariant under every listed derivation:
/// `X_i(f_j)` lies in the ideal for all generators.
pub fn is_invariant(gens: &[Derivation], ideal: &Ideal) -> Result<bool, EngineError> {
    for x in gens {
        for f in ideal.generators() {
            if !ideal.contains(&x.apply(f)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether the distribution is totally transverse to `V(I)`: the d-Fitting
/// ideal together with the ideal generates the unit ideal.
pub fn is_totally_transverse(dist: &Distribution, ideal: &Ideal) -> Result<bool, EngineError> {
    let gamma = fitting_ideal(dist.generators(), ideal, dist.leaf_dimension())?;
    Ok(gamma.sum(ideal)?.is_unit_ideal())
}

/// Pointwise regularity criterion: the distribution is regular at `p` when
/// the d-Fitting ideal of the maximal ideal at `p`, together with that
/// maximal ideal, is the unit ideal.
pub fn regular_at(dist: &Distribution, p: &Point) -> Result<bool, EngineError> {
    if p.dim() != dist.nvars() {
        return Err(EngineError::DimensionMismatch {
            expected: dist.nvars(),
            got: p.dim(),
        });
    }
    let mp = Ideal::maximal_ideal_at(p);
    let gamma = fitting_ideal(dist.generators(), &mp, dist.leaf_dimension())?;
    Ok(gamma.sum(&mp)?.is_unit_ideal())
}

/// The iterated-enlargement chain `H_0 = I`, `H_{i+1} = H_i + θ[H_i]`,
/// stored up to (and including) the first repeated ideal.
#[derive(Debug, Clone)]
pub struct TangencyChain {
    ideals: Vec<Ideal>,
    stabilization_index: usize,
    stabilized: bool,
}

impl TangencyChain {
    pub fn ideals(&self) -> &[Ideal] {
        &self.ideals
    }

    /// The chain ideal at step `i`; past the stored range the chain is
    /// constant, so the last ideal is returned.
    pub fn ideal_at(&self, i: usize) -> &Ideal {
        let last = self.ideals.len() - 1;
        &self.ideals[i.min(last)]
    }

    /// First index whose ideal equals the next one (meaningful only when
    /// [`TangencyChain::is_stabilized`] holds).
    pub fn stabilization_index(&self) -> usize {
        self.stabilization_index
    }

    pub fn is_stabilized(&self) -> bool {
        self.stabilized
    }
}

/// Rebuilds an ideal on its reduced Gröbner basis so stored chain entries
/// stay small and print deterministically.
fn normalized(ideal: &Ideal) -> Result<Ideal, EngineError> {
    let elements = ideal.groebner_basis().elements().to_vec();
    Ideal::new(ideal.nvars(), elements)
}

/// The ideal generated by all `X_i(f_j)` over the current generators.
fn derivative_ideal(gens: &[Derivation], ideal: &Ideal) -> Result<Ideal, EngineError> {
    let mut derived = Vec::new();
    for x in gens {
        for f in ideal.generators() {
            derived.push(x.apply(f)?);
        }
    }
    Ideal::new(ideal.nvars(), derived)
}

/// Computes the tangency chain of the pair, iterating until stabilization is
/// detected or `max_steps` enlargements have been applied.
pub fn tangency_chain(
    gens: &[Derivation],
    ideal: &Ideal,
    max_steps: usize,
) -> Result<TangencyChain, EngineError> {
    if max_steps == 0 {
        return Err(EngineError::Precondition(
            "tangency chain needs at least one step".into(),
        ));
    }
    let mut ideals = vec![normalized(ideal)?];
    let mut stabilized = false;
    let mut stabilization_index = 0;
    for step in 0..max_steps {
        let current = &ideals[step];
        let next = normalized(&current.sum(&derivative_ideal(gens, current)?)?)?;
        if !next.contains_ideal(current)? {
            return Err(EngineError::Internal(
                "tangency chain lost monotonicity".into(),
            ));
        }
        let settled = next.equals(current)?;
        ideals.push(next);
        if settled {
            stabilized = true;
            stabilization_index = step;
            break;
        }
    }
    if !stabilized {
        stabilization_index = ideals.len() - 1;
    }
    Ok(TangencyChain {
        ideals,
        stabilization_index,
        stabilized,
    })
}

/// Pointwise order and type of a stabilized chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TgInvariant {
    pub nu: usize,
    /// 1 when the stalk of the settled ideal at the point is the unit ideal,
    /// 2 when every generator vanishes there.
    pub chain_type: u8,
}

impl std::fmt::Display for TgInvariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(nu={}, type={})", self.nu, self.chain_type)
    }
}

/// Pointwise chain order and type: `nu` is the least index from which the
/// chain is stalkwise constant at `p` (detected through colon-ideal
/// supports), and the type records whether the settled stalk is proper.
pub fn tg_invariant_at_point(chain: &TangencyChain, p: &Point) -> Result<TgInvariant, EngineError> {
    if !chain.is_stabilized() {
        return Err(EngineError::UnstabilizedChain {
            max_steps: chain.ideals().len().saturating_sub(1),
        });
    }
    let s = chain.stabilization_index();
    let mut nu = 0usize;
    for j in 0..s {
        let quotient = chain.ideals()[j].quotient(&chain.ideals()[j + 1])?;
        // p lies in V(H_j : H_{j+1}) exactly when the chain still moves at p.
        if quotient.vanishes_at(p)? {
            nu = j + 1;
        }
    }
    let settled = chain.ideal_at(nu);
    let chain_type = if settled.vanishes_at(p)? { 2 } else { 1 };
    Ok(TgInvariant { nu, chain_type })
}

/// The smallest invariant ideal containing `I`: the stabilized chain ideal.
pub fn differential_closure(
    gens: &[Derivation],
    ideal: &Ideal,
    max_steps: usize,
) -> Result<Ideal, EngineError> {
    let chain = tangency_chain(gens, ideal, max_steps)?;
    if !chain.is_stabilized() {
        return Err(EngineError::UnstabilizedChain { max_steps });
    }
    let closure = chain.ideals()[chain.stabilization_index()].clone();
    if !is_invariant(gens, &closure)? {
        return Err(EngineError::Internal(
            "stabilized chain ideal is not invariant".into(),
        ));
    }
    Ok(closure)
}
