//! Center suggestion heuristic for monomial ideals.
//!
//! For an ideal generated by monomials, the candidate center is the
//! coordinate subspace spanned by the union of supports of the minimal
//! generators of maximal total degree; it is suggested only when it passes
//! the admissibility check. Non-monomial ideals get no suggestion.

use foliation_core::admissibility::admissibility_report;
use foliation_core::derivation::Distribution;
use foliation_core::ideal::Ideal;
use foliation_core::monomial::Monomial;
use foliation_core::EngineError;

/// The minimal monomial generators when every generator is a single term;
/// `None` otherwise.
fn minimal_monomial_generators(ideal: &Ideal) -> Option<Vec<Monomial>> {
    let mut monomials = Vec::new();
    for g in ideal.generators() {
        let mut terms = g.terms();
        match (terms.next(), terms.next()) {
            (Some((m, _)), None) => monomials.push(m.clone()),
            _ => return None,
        }
    }
    // Keep only divisibility-minimal elements.
    let minimal: Vec<Monomial> = monomials
        .iter()
        .filter(|m| {
            !monomials
                .iter()
                .any(|other| other != *m && other.divides(m))
        })
        .cloned()
        .collect();
    let mut deduped: Vec<Monomial> = Vec::new();
    for m in minimal {
        if !deduped.contains(&m) {
            deduped.push(m);
        }
    }
    Some(deduped)
}

/// Suggests a coordinate-subspace blowup center for a monomial ideal, or
/// returns `None` when the ideal is not monomial, the support union is
/// empty, or the candidate fails the admissibility check.
pub fn suggest_center(
    dist: &Distribution,
    ideal: &Ideal,
) -> Result<Option<Vec<usize>>, EngineError> {
    let Some(minimal) = minimal_monomial_generators(ideal) else {
        return Ok(None);
    };
    let max_degree = match minimal.iter().map(Monomial::total_degree).max() {
        Some(d) if d > 0 => d,
        _ => return Ok(None),
    };
    let mut variables: Vec<usize> = Vec::new();
    for m in minimal.iter().filter(|m| m.total_degree() == max_degree) {
        for &(var, _) in m.pairs() {
            if !variables.contains(&var) {
                variables.push(var);
            }
        }
    }
    variables.sort_unstable();
    if variables.is_empty() {
        return Ok(None);
    }
    let center_gens = variables
        .iter()
        .map(|&v| foliation_core::Polynomial::var(ideal.nvars(), v))
        .collect::<Result<Vec<_>, _>>()?;
    let center = Ideal::new(ideal.nvars(), center_gens)?;
    let report = admissibility_report(dist, &center)?;
    if report.is_admissible() {
        Ok(Some(variables))
    } else {
        Ok(None)
    }
}
