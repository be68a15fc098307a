use thiserror::Error;

/// Every failure the decomposition pipeline can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unit mismatch on `{var}`: `{left}` vs `{right}`")]
    UnitMismatch {
        var: String,
        left: String,
        right: String,
    },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("empty range for `{var}` (internal conflict between {sources:?})")]
    EmptyRange { var: String, sources: Vec<String> },
    #[error("variable `{0}` not found")]
    NotFound(String),
    #[error("duplicate variable `{var}` in {context}")]
    Duplicate { var: String, context: String },
    #[error("`{fr_j}` and `{fr_k}` are not composable on `{var}`")]
    NotComposable {
        fr_j: String,
        fr_k: String,
        var: String,
    },
    #[error("coverage violation: {missing:?} not covered by the architecture")]
    CoverageViolation { missing: Vec<String> },
    #[error("architecture range of `{var}` does not contain the required range")]
    RangeNotContained { var: String },
    #[error("`{var}` is produced by both `{first}` and `{second}`")]
    ProducerConflict {
        var: String,
        first: String,
        second: String,
    },
    #[error("algebraic cycle through {0:?}")]
    AlgebraicCycle(Vec<String>),
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("non-finite value for `{var}` at t={t}")]
    NonFinite { var: String, t: f64 },
    #[error("sample {sample} failed: {source}")]
    Sample {
        sample: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("controllable narrowing infeasible: {0}")]
    Infeasible(String),
    #[error("brackets infeasible for `{0}`")]
    InfeasibleBrackets(String),
    #[error("no interior point for `{0}`")]
    NoInteriorPoint(String),
    #[error("barrier evaluated on the boundary of `{0}`")]
    BoundaryContact(String),
    #[error("sub-requirement postcondition failed ({law}): {witness}")]
    PostconditionFailure { law: String, witness: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
