//! Crate-wide error type.

/// Errors produced by the allocation solvers, the simulator and the
/// scenario runner.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An argument is outside its mathematical domain (non-positive gain,
    /// negative bits, fewer than two antennas, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A level search did not meet its tolerance within the iteration cap.
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// The instance exceeds an enumeration or size guard.
    #[error("instance too large: {0}")]
    TooLarge(String),

    /// Vector/matrix dimensions do not match the system parameters.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The stacked channel matrix is (numerically) rank deficient; the
    /// caller should retry with fresh randomness.
    #[error("channel matrix is rank deficient")]
    RankDeficient,

    /// A scenario file could not be parsed.
    #[error("scenario parse error: {0}")]
    ScenarioParse(String),

    /// A scenario file parsed but violates the schema.
    #[error("scenario validation error: {0}")]
    ScenarioInvalid(String),

    /// Filesystem failure while reading or writing scenario/CSV data.
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
