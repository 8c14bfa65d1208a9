use thiserror::Error;

use crate::linalg::C64;
use crate::solvers::EigenResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A Ritz pair that met the Arnoldi convergence test before the Krylov
/// budget ran out.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialRitz {
    /// Eigenvalue of the shift-and-invert operator.
    pub mu: C64,
    pub vector: Vec<C64>,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is numerically singular (pivot {pivot} below threshold {threshold:e})")]
    SingularMatrix { pivot: usize, threshold: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("QR iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("quadrature order {0} is too small")]
    InvalidOrder(usize),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation of T failed at node {0}")]
    EvaluationFailure(usize),

    #[error("evaluation point coincides with pole {0}")]
    PoleHit(usize),

    #[error("expansion order {0} is too small for a linearization (need m >= 2)")]
    OrderTooSmall(usize),

    #[error("shifted pencil (A - σM) is numerically singular")]
    SingularShift,

    #[error("requested {requested} finite eigenvalues but only {found} exist")]
    InsufficientFinite { requested: usize, found: usize },

    #[error("shift coincides with pole {0}")]
    ShiftOnPole(usize),

    #[error("Schur complement is singular: the shift is an eigenvalue of the approximant")]
    SingularSchur,

    #[error("matrix G is singular: the interval center is an eigenvalue of the interpolant")]
    SingularG,

    #[error("Arnoldi converged only {achieved} of the requested Ritz pairs")]
    ArnoldiNoConvergence { achieved: usize, partial: Vec<PartialRitz> },

    #[error("vector is zero")]
    ZeroVector,

    #[error("leading coefficient of the quadratic problem is singular")]
    SingularLeading,

    #[error("Newton iteration did not converge from seed {0}")]
    OracleNoConvergence(C64),

    #[error("outer iteration did not reach the tolerance")]
    NotConverged(Box<EigenResult>),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping [`Error::Context`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

pub(crate) trait ResultExt<T> {
    fn context(self, context: impl Into<String>) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context(self, context: impl Into<String>) -> Result<T> {
        self.map_err(|e| e.context(context))
    }
}
