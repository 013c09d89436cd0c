use thiserror::Error;

use crate::analysis::Divergence;
use crate::syntax::{ParseError, Violation};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid rewb: {0}")]
    Invalid(#[from] Violation),
    #[error("rewb is not closed-star")]
    NotClosedStar,
    #[error("bounds diverged: {0}")]
    Diverged(Box<Divergence>),
    #[error("budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("run does not match ref-string: {0}")]
    RunMismatch(String),
    #[error("grammar text, line {line}: {message}")]
    GrammarSyntax { line: usize, message: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid ref-string token `{0}`")]
    RefToken(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl From<Divergence> for Error {
    fn from(d: Divergence) -> Self {
        Error::Diverged(Box::new(d))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
