//! Error type shared by the whole engine.

use thiserror::Error;

/// Errors raised by exact-algebra, ideal, derivation, blowup and
/// admissibility operations.
///
/// Every operation that can fail returns `Result<_, EngineError>`; nothing
/// panics on malformed mathematical input.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    /// Two objects that must live in the same variable context do not.
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A variable index outside the current chart was referenced.
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    /// A substitution did not provide an image for every variable.
    #[error("substitution images missing: expected {expected} images, got {got}")]
    UnmappedVariable { expected: usize, got: usize },

    /// Exact division failed: the requested factor does not divide.
    #[error("exact division failed: {0}")]
    NotDivisible(String),

    /// Division by the zero polynomial.
    #[error("division by zero polynomial")]
    DivisionByZero,

    /// A controlled transform was requested for a center that is not
    /// everywhere of order at least one for the ideal.
    #[error("order-one violation: {0}")]
    OrderOneViolation(String),

    /// The blowup chart variable does not belong to the center.
    #[error("chart variable {var} is not a member of the blowup center")]
    ChartVariableNotInCenter { var: String },

    /// A blowup center referenced a variable that does not exist.
    #[error("center variable {var} not present in the current chart")]
    CenterVariableUnknown { var: String },

    /// A tangency chain failed to stabilize within the step budget.
    #[error("tangency chain did not stabilize within {max_steps} steps")]
    UnstabilizedChain { max_steps: usize },

    /// A pulled-back object kept a genuine pole where an analytic object
    /// was required; the certificate that promised analyticity is wrong.
    #[error("pole obstruction: {0}")]
    PoleObstruction(String),

    /// A transformed generator is not tangent to a divisor it must preserve.
    #[error("tangency obstruction: {0}")]
    TangencyObstruction(String),

    /// The admissibility certificate passed to a transform is inconsistent
    /// with the data it claims to describe.
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    /// A transverse/invariant split exists analytically but cannot be built
    /// with the affine-linear changes this engine restricts itself to.
    #[error("split not constructible under linear restriction: {0}")]
    SplitNotConstructible(String),

    /// A coordinate change was rejected (non-invertible, not affine-linear,
    /// or it destroys a tracked divisor equation).
    #[error("invalid coordinate change: {0}")]
    InvalidChange(String),

    /// A precondition documented on the operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Internal consistency check failed; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
