use crate::lang::{Diagnostic, ParseError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid program:{}", .0.iter().map(|d| format!("\n  {d}")).collect::<String>())]
    Invalid(Vec<Diagnostic>),
    #[error("{0}")]
    Name(String),
    #[error("state cap of {cap} exceeded while building the {what}")]
    StateCap { cap: usize, what: &'static str },
    #[error("unknown observable `{0}` (or free fixpoint variable)")]
    UnknownObservable(String),
    #[error("formula is not closed: `{0}` is unbound")]
    OpenFormula(String),
    #[error("formula syntax error at offset {offset}: {message}")]
    FormulaSyntax { offset: usize, message: String },
    #[error("{0}")]
    Fragment(String),
    #[error("command {0} already has an append chain; translation needs plain commands")]
    NotPlain(usize),
    #[error("guard of command {0} is false in the given state")]
    GuardFalse(usize),
    #[error("execution does not replay: {0}")]
    Replay(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
