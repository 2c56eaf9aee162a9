use thiserror::Error;

/// Errors produced by generators, numeric routines, and the experiment
/// harness. Validation errors map to CLI exit code 1, numeric failures
/// to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incompatible configuration: {0}")]
    IncompatibleConfig(String),

    #[error("series for {what} did not converge within {max_terms} terms (x = {x})")]
    SeriesDivergence {
        what: &'static str,
        x: f64,
        max_terms: usize,
    },

    #[error("step-halving disagreement {disagreement:e} exceeds {tol:e} at c = {c}")]
    OdeDisagreement { c: f64, disagreement: f64, tol: f64 },

    #[error("fixed-point iteration did not reach residual {tol:e} within {max_iters} iterations (c = {c}, residual = {residual:e})")]
    FixedPointMaxIters {
        c: f64,
        residual: f64,
        tol: f64,
        max_iters: u64,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code class: 1 for validation problems, 2 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::IncompatibleConfig(_)
            | Error::Format(_)
            | Error::Io(_) => 1,
            Error::SeriesDivergence { .. }
            | Error::OdeDisagreement { .. }
            | Error::FixedPointMaxIters { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
