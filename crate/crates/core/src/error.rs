use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: argument {eps} is within 1e-12 of an integer")]
    Pole { eps: f64 },

    #[error("invalid bracket [{lo}, {hi}]: residual has no sign change")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
