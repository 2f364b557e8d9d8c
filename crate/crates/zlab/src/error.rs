//! Error type shared across the library.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ZlabError {
    #[error("identity letter at position {position} in stored word")]
    IdentityLetter { position: usize },
    #[error("letters at positions {} and {position} come from the same factor", position - 1)]
    NonAlternating { position: usize },
    #[error("unknown factor tag `{0}`")]
    UnknownFactor(String),
    #[error("cannot parse word token `{0}`")]
    WordParse(String),
    #[error("letter index {k} out of range for word of length {len}")]
    LetterIndex { k: usize, len: usize },
    #[error("prefix length {k} exceeds word length {len}")]
    PrefixTooLong { k: usize, len: usize },
    #[error("carrier coordinate {0} outside the model domain")]
    InvalidCarrier(f64),
    #[error("point lies on the boundary; the action does not extend (model is not an EZ-model)")]
    BoundaryAction,
    #[error("model `{0}` does not extend its action to the compactification")]
    NotEzModel(String),
    #[error("time {0} outside [0,1]")]
    TimeOutOfRange(f64),
    #[error("parameter {name} = {value} out of range: {what}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        what: &'static str,
    },
    #[error("overhang depth j(w) = {0} < 2; t(w) is defined for j >= 2")]
    OverhangTooShallow(usize),
    #[error("end prefix `{0}` lies inside the core Z_eps; projection is undetermined at this depth")]
    EndPrefixInsideCore(String),
    #[error("translate side {side} requires final letter in {expected}")]
    BadTranslateSide { side: char, expected: char },
    #[error("cannot parse point `{0}`")]
    PointParse(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, ZlabError>;
