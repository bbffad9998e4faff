use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Variants fall into three families that the command-line driver maps to
/// exit codes: malformed input, violated mathematical preconditions, and
/// numerical procedures that failed to converge or resolve.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not normal: ||a*a - aa*|| = {defect:.3e}")]
    Normality { defect: f64 },

    #[error("resolvent is singular or ill-conditioned: distance to spectrum ~ {distance:.3e}")]
    Resolvent { distance: f64 },

    #[error("spectrum condition violated: {0}")]
    Spectrum(String),

    #[error("b is not a function of a: {0}")]
    Function(String),

    #[error("a and b do not commute: ||[a,b]|| = {defect:.3e}")]
    Commute { defect: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("Lipschitz condition fails on eigenvalue pair ({i}, {j}): ratio {ratio:.6}")]
    Lipschitz { i: usize, j: usize, ratio: f64 },

    #[error("variance domination fails: {0}")]
    Domination(String),

    #[error("precondition failed: kappa(a,b) = {kappa_ab:.6}, kappa(b,a) = {kappa_ba:.6}")]
    Precondition { kappa_ab: f64, kappa_ba: f64 },

    #[error("unstable derivative estimate: {0}")]
    Derivative(String),

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("integral diverges under refinement: {0}")]
    Divergence(String),

    #[error("no convergence: {0}")]
    Convergence(String),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Normality { .. } => "normality",
            Error::Resolvent { .. } => "resolvent",
            Error::Spectrum(_) => "spectrum",
            Error::Function(_) => "function",
            Error::Commute { .. } => "commute",
            Error::Degenerate(_) => "degenerate",
            Error::Lipschitz { .. } => "lipschitz",
            Error::Domination(_) => "domination",
            Error::Precondition { .. } => "precondition",
            Error::Derivative(_) => "derivative",
            Error::Resolution(_) => "resolution",
            Error::Divergence(_) => "divergence",
            Error::Convergence(_) => "convergence",
        }
    }

    pub(crate) fn shape(expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::DimensionMismatch { expected: expected.into(), found: found.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
