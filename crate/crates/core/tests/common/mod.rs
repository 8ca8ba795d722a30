//! Shared random-value strategies for the property suites.
// Each test binary compiles this module separately, so a helper used by only
// one suite would otherwise warn in the others.
#![allow(dead_code)]

use foliation_core::monomial::Monomial;
use foliation_core::poly::{q_int, Polynomial, Q};
use proptest::collection::vec;
use proptest::prelude::*;

/// A sparse polynomial in `nvars` variables with per-term total degree at
/// most `max_deg` and at most `max_terms` terms, small integer coefficients.
pub fn arb_poly(nvars: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    let term = (vec(0u32..=max_deg, nvars), -4i64..=4i64);
    vec(term, 0..=max_terms).prop_map(move |terms| {
        Polynomial::from_terms(
            nvars,
            terms.into_iter().filter_map(|(exps, c)| {
                let total: u32 = exps.iter().sum();
                if total > max_deg || c == 0 {
                    return None;
                }
                let pairs: Vec<(usize, u32)> =
                    exps.into_iter().enumerate().map(|(i, e)| (i, e)).collect();
                Some((Monomial::from_pairs(pairs), q_int(c)))
            }),
        )
    })
}

/// Like [`arb_poly`] but never the zero polynomial.
pub fn arb_nonzero_poly(
    nvars: usize,
    max_deg: u32,
    max_terms: usize,
) -> impl Strategy<Value = Polynomial> {
    arb_poly(nvars, max_deg, max_terms)
        .prop_filter("nonzero polynomial", |p| !p.is_zero())
}

/// A monomial in `nvars` variables of total degree at most `max_deg`.
pub fn arb_monomial(nvars: usize, max_deg: u32) -> impl Strategy<Value = Monomial> {
    vec(0u32..=max_deg, nvars).prop_filter_map("bounded degree", move |exps| {
        let total: u32 = exps.iter().sum();
        if total > max_deg {
            return None;
        }
        Some(Monomial::from_pairs(
            exps.into_iter().enumerate().map(|(i, e)| (i, e)).collect(),
        ))
    })
}

/// A small rational from a bounded numerator/denominator pair.
pub fn arb_q() -> impl Strategy<Value = Q> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}
