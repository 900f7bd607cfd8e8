use thiserror::Error;

use crate::linalg::DenseMatrix;
use crate::mc::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Iterate state of a solver that hit its iteration budget.
///
/// `primary` is `X` for matrix completion and `L` for robust PCA; `secondary` holds `S`.
#[derive(Debug, Clone)]
pub struct PartialSolution {
    pub primary: DenseMatrix,
    pub secondary: Option<DenseMatrix>,
    pub dual: DenseMatrix,
    pub report: SolveReport,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("entry {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("index ({row}, {col}) out of range for a {rows}x{cols} support set")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("duplicate index ({row}, {col}) in support set")]
    DuplicateIndex { row: usize, col: usize },

    #[error("support set is empty")]
    EmptySupport,

    #[error("matrix is zero")]
    ZeroMatrix,

    #[error("SVD did not converge")]
    SvdNotConverged,

    #[error("rank is ambiguous at cutoff {cutoff:e}: singular value ratio {ratio:e} lies near it")]
    AmbiguousRank { cutoff: f64, ratio: f64 },

    #[error("conjugate gradient stopped after {iterations} iterations at relative residual {residual:.3e}")]
    CgNotConverged { iterations: usize, residual: f64 },

    #[error("conjugate gradient breakdown: operator is not positive definite on the search direction")]
    CgBreakdown,

    #[error("{solver} solver stopped after {iterations} iterations at relative feasibility {residual:.3e} (target {tol:.1e})")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        residual: f64,
        tol: f64,
        partial: Box<PartialSolution>,
    },

    #[error("instance outside the certified regime: {0}")]
    Regime(String),
}

impl Error {
    pub(crate) fn dims(expected: (usize, usize), found: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            expected: format!("{}x{}", expected.0, expected.1),
            found: format!("{}x{}", found.0, found.1),
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures that mean "this instance is outside the regime where the
    /// theory applies" rather than bad input.
    pub fn is_regime(&self) -> bool {
        matches!(
            self,
            Error::Regime(_) | Error::CgBreakdown | Error::CgNotConverged { .. }
        )
    }
}
