//! CLI error type with the exit-code contract:
//! 0 success, 1 usage/parse/domain errors, 2 training divergence or
//! non-convergence.

use thiserror::Error;

use flannquad::basis::BasisError;
use flannquad::expr::{EvalError, ParseError};
use flannquad::integrator::NetworkError;
use flannquad::quadrature::QuadratureError;
use flannquad::trainer::TrainError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("integrand not evaluable: {0}")]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Network(#[from] NetworkError),
    #[error("{0}")]
    Basis(#[from] BasisError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Diverged(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{context}: {message}")]
    Io { context: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Diverged(_) | CliError::NonConvergence(_) => 2,
            _ => 1,
        }
    }

    pub fn io(context: impl Into<String>, err: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            message: err.to_string(),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(err: TrainError) -> Self {
        match err {
            TrainError::Diverged { .. } => CliError::Diverged(err.to_string()),
            TrainError::Eval(e) => CliError::Eval(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<QuadratureError> for CliError {
    fn from(err: QuadratureError) -> Self {
        match err {
            QuadratureError::NonConvergence => CliError::NonConvergence(err.to_string()),
            QuadratureError::Eval(e) => CliError::Eval(e),
            other => CliError::Config(other.to_string()),
        }
    }
}
