use crate::solver::SolveReport;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate spectrum: eigenvalue gap {gap:.3e} is below tolerance {tol:.3e}")]
    DegenerateSpectrum { gap: f64, tol: f64 },

    #[error(
        "newton solver did not converge: {} iterations, residual {:.3e}",
        report.iterations,
        report.final_residual
    )]
    NonConvergence { report: SolveReport },

    #[error(
        "admissibility unrecoverable: iterate left the closed Gamma_{k} cone after {halvings} step halvings"
    )]
    ConeViolation { k: usize, halvings: usize, report: SolveReport },

    #[error("shifted spectrum has negative entry {value:.3e} beyond tolerance (node {node})")]
    Admissibility { node: usize, value: f64 },

    #[error("rhs evaluator returned nonpositive value {value:.3e}")]
    NonpositiveRhs { value: f64 },

    #[error("quadratic growth violated at |x| = {radius:.6}: u = {value:.6e} < {bound:.6e}")]
    GrowthViolation { radius: f64, value: f64, bound: f64 },

    #[error("sublevel set reaches the sampling box boundary; growth certificate does not bound it")]
    UnboundedSublevel,

    #[error("rejection sampler exhausted {tries} tries (n = {n}, cone level {level})")]
    SamplingExhausted { tries: usize, n: usize, level: usize },

    #[error("field file parse error: {0}")]
    FieldParse(String),

    #[error("linear solver failed: {0}")]
    LinearSolve(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
