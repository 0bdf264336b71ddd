use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: expected {}", expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<String> },
    #[error("invalid action name `{0}`")]
    InvalidAction(String),
    #[error("term contains variable `{0}` but a closed term is required")]
    OpenTerm(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown semantics `{0}`")]
    UnknownSemantics(String),
    #[error("{what} exceeded the cap of {cap}")]
    CapExceeded { what: String, cap: usize },
    #[error("cannot compare local observations of different constraints")]
    MixedConstraints,
    #[error("alphabet has {0} actions; at most 64 are supported")]
    AlphabetTooLarge(usize),
    #[error("malformed JSON term: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
