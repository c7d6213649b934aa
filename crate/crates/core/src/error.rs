use thiserror::Error;

/// Errors raised by every stage of the pipeline, from building an algebra
/// to classifying Casimir deformations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported Lie algebra family `{0}` (only A, B, C, D are realized)")]
    UnsupportedFamily(String),
    #[error("rank {rank} is out of range for family {family} (allowed {min}..={max})")]
    RankOutOfRange {
        family: char,
        rank: usize,
        min: usize,
        max: usize,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Cartan subalgebra check failed: {0}")]
    CartanNotFound(String),
    #[error("root extraction hit degenerate eigenvalues: {0}")]
    DegenerateEigenvalues(String),
    #[error("Weyl group closure exceeded {0} elements")]
    ClosureOverflow(usize),
    #[error("eigensolver failure: {0}")]
    EigensolverFailure(String),
    #[error("induced action on invariants is not linear (residual {residual:.3e})")]
    NonlinearInducedAction { residual: f64 },
    #[error("invariant generators are not independent: smallest singular value {0:.3e}")]
    IndependenceCheckFailed(f64),
    #[error("verification `{suite}` failed: {detail}")]
    VerificationFailed { suite: String, detail: String },
    #[error("injectivity failure: {0}")]
    InjectivityFailure(String),
    #[error("interior Jacobian degenerate: min |det| = {0:.3e}")]
    JacobianDegenerateInterior(f64),
    #[error("gradient unavailable: {0}")]
    GradientUnavailable(String),
    #[error("Jacobi identity violated for triple ({i}, {j}, {k}): residual {residual:.3e}")]
    JacobiViolation {
        i: usize,
        j: usize,
        k: usize,
        residual: f64,
    },
    #[error("conformal factor is not positive: f = {0:.6e}")]
    NonPositiveCasimir(f64),
    #[error("step size rejected: {quantity} drifted by {drift:.3e} (bound {bound:.3e})")]
    StepSizeRejected {
        quantity: String,
        drift: f64,
        bound: f64,
    },
    #[error("mesh too coarse: {0}")]
    MeshTooCoarse(String),
    #[error("grid is empty")]
    GridEmpty,
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("reference mismatch in clause {clause}: {detail}")]
    ReferenceMismatch { clause: String, detail: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("expression parse error at {position}: {message}")]
    Parse { position: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
