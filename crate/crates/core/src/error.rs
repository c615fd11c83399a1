//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// Variants split into two families: input validation (bad states, operators,
/// scenario parameters, files) and numerical failures (quadrature budget
/// exhaustion, LP infeasibility). The CLI maps the first family to exit code
/// 1 and the second to exit code 2, see [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state norm {norm} deviates from 1 by more than {tolerance}")]
    NotNormalized { norm: f64, tolerance: f64 },

    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("operator is not Hermitian (max |A - A^dag| entry = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not a projector (idempotency residual {residual:.3e})")]
    NotProjector { residual: f64 },

    #[error("pre- and post-selection are orthogonal (p_phi = {p_phi:.3e})")]
    OrthogonalSelection { p_phi: f64 },

    #[error("pointer width must be positive and finite, got sigma = {0}")]
    InvalidSigma(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "quadrature did not converge: {panels} panels used, worst panel error {worst_error:.3e}"
    )]
    QuadratureDidNotConverge { panels: usize, worst_error: f64 },

    #[error("residual {worst:.3e} exceeds tolerance {tolerance:.3e}")]
    ResidualExceedsTolerance { worst: f64, tolerance: f64 },

    #[error("linear program is infeasible (phase-1 residual {residual:.3e})")]
    LpInfeasible { residual: f64 },

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI uses for this error: 1 for validation
    /// problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::QuadratureDidNotConverge { .. }
            | Error::ResidualExceedsTolerance { .. }
            | Error::LpInfeasible { .. }
            | Error::LpUnbounded => 2,
            _ => 1,
        }
    }
}
