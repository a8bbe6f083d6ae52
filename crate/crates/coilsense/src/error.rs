use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("column {column} is constant; cannot standardize")]
    ConstantColumn { column: usize },

    #[error("degenerate normalization scale in column {column}: soft p90 equals hard p10")]
    DegenerateScale { column: usize },

    #[error("did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("requested {requested} components but the data supports only {rank}")]
    RankExhausted { requested: usize, rank: usize },

    #[error("scores contain only a single class")]
    SingleClass,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
