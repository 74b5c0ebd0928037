use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("unknown hospital index {0}")]
    UnknownHospital(usize),
    #[error("unknown student index {0}")]
    UnknownStudent(usize),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("hospital `{0}` has quota 0; quotas must be positive")]
    ZeroQuota(String),
    #[error("hospital `{hospital}` lists {found} utilities for {expected} students")]
    UtilityRowLength { hospital: String, expected: usize, found: usize },
    #[error("hospital `{hospital}` assigns non-positive utility {value} to student `{student}`")]
    NonPositiveUtility { hospital: String, student: String, value: String },
    #[error("hospital `{hospital}` assigns the same utility {value} to two students")]
    DuplicateUtility { hospital: String, value: String },
    #[error("student `{student}` lists hospital `{hospital}` more than once")]
    DuplicatePreference { student: String, hospital: String },
    #[error("hospital index {hospital} would hold {size} students but its quota is {quota}")]
    QuotaExceeded { hospital: usize, size: usize, quota: usize },
    #[error("student index {0} appears more than once in a student set")]
    RepeatedStudent(usize),
    #[error("matching has {found} {side} but the market has {expected}")]
    ShapeMismatch { side: &'static str, expected: usize, found: usize },
    #[error("enumeration over {students} students exceeds the cap of {cap}")]
    CapExceeded { students: usize, cap: usize },
}

/// Parse failure with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}
