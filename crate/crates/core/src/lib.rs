//! Exact symbolic engine for ideal sheaves and singular distributions on
//! affine charts.
//!
//! The crate provides, bottom up:
//!
//! * exact polynomial and Laurent-polynomial arithmetic over the rationals
//!   ([`poly`], [`laurent`]);
//! * Gröbner bases and ideal-theoretic decision procedures ([`ideal`]),
//!   including Gröbner bases of submodules of free modules ([`modvec`]);
//! * polynomial vector fields, distributions, coordinate changes and the
//!   monomial-basis machinery ([`derivation`]);
//! * generalized Fitting ideals, tangency chains and their pointwise
//!   invariants ([`fitting`]);
//! * blowup charts, transform laws for ideals and derivations, divisor
//!   ledgers and towers ([`blowup`], [`tower`]);
//! * admissibility analysis of blowup centers ([`admissibility`]);
//! * a textual syntax for polynomials and derivations ([`text`]).
//!
//! All values are immutable; the only internal mutability is the write-once
//! Gröbner-basis cache inside [`ideal::Ideal`], which is safe to share
//! across threads.

pub mod admissibility;
pub mod blowup;
pub mod derivation;
pub mod error;
pub mod fitting;
pub mod ideal;
pub mod laurent;
mod linalg;
pub mod modvec;
pub mod monomial;
pub mod poly;
pub mod text;
pub mod tower;

pub use error::EngineError;
pub use ideal::{GroebnerBasis, Ideal};
pub use monomial::{Monomial, MonomialOrder};
pub use poly::{Point, Polynomial, Q};
