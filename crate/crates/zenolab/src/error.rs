//! Error type shared by all modules.

use num_complex::Complex64 as C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Malformed or out-of-contract input (dimension mismatch, non-finite
    /// entries, non-unit initial state, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative numerical procedure did not reach its target accuracy.
    #[error("numeric failure: {message} (achieved residual {residual:.3e})")]
    NumericFailure { message: String, residual: f64 },

    /// An operation was called outside the contract that makes its result
    /// meaningful (e.g. a quadratic short-time check on a non-Hermitian
    /// generator).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Effective decay rate requested at a survival zero.
    #[error("divergent effective rate: survival probability {survival:.3e} at tau = {tau}")]
    DivergentRate { tau: f64, survival: f64 },

    /// Parameters outside the physical regime an operation is defined for.
    #[error("regime error: {0}")]
    Regime(String),

    /// Invalid run configuration (grids, resolutions, schema violations).
    #[error("configuration error: {0}")]
    Config(String),

    /// A stored series or grid is too coarse for the requested analysis.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Evaluation requested on a branch cut; use the boundary-value API.
    #[error("boundary error: {0}")]
    Boundary(String),

    /// Evaluation at a support endpoint where the integrand is singular.
    #[error("endpoint singularity: {0}")]
    EndpointSingularity(String),

    /// Analytic continuation is not defined for this form factor.
    #[error("unsupported continuation: {0}")]
    UnsupportedContinuation(String),

    /// Argument outside the domain of the requested sheet.
    #[error("domain error: {0}")]
    Domain(String),

    /// Root search failed; the iterate trajectory is attached for diagnosis.
    #[error("solver failure: {message} ({} iterates recorded)", trajectory.len())]
    Solver { message: String, trajectory: Vec<C64> },

    /// A located pole escaped the region where the model is trustworthy.
    #[error("model regime error: {0}")]
    ModelRegime(String),

    /// An internal cross-check failed (e.g. spectral normalization).
    #[error("consistency error: {0}")]
    Consistency(String),

    /// A regime fit could not find the data window it needs.
    #[error("window error: {0}")]
    Window(String),
}
