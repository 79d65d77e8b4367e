use thiserror::Error;

use crate::model::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{column}: syntax error: {message} (expected one of: {})", expected.join(", "))]
    Syntax {
        line: usize,
        column: usize,
        message: String,
        expected: Vec<String>,
    },

    #[error("{line}:{column}: {message}")]
    Resolve {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid model `{model}`: {}", diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidModel {
        model: String,
        diagnostics: Vec<Diagnostic>,
    },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown value `{value}` for variable `{variable}`")]
    UnknownValue { variable: String, value: String },

    #[error("variable `{0}` is not endogenous")]
    NotEndogenous(String),

    #[error("context does not assign exogenous variable `{0}`")]
    MissingContextValue(String),

    #[error("context assigns `{0}`, which is not an exogenous variable")]
    UnexpectedContextValue(String),

    #[error("inconsistent events: `{variable}` is set to both `{first}` and `{second}`")]
    Inconsistent {
        variable: String,
        first: String,
        second: String,
    },

    #[error("equation for `{variable}` produced {produced}, outside its range of {range_len} values")]
    OutOfRange {
        variable: String,
        produced: i64,
        range_len: usize,
    },

    #[error("search cap exceeded: {what} is {requested}, limit is {limit}")]
    SearchCap {
        what: String,
        limit: u64,
        requested: u64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// True for errors raised by an exhausted search budget.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::SearchCap { .. })
    }
}
