use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty table")]
    EmptyTable,
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("{}value `{value}` is not in the vocabulary of column `{column}`", row_prefix(*row))]
    UnknownValue { row: Option<usize>, column: String, value: String },
    #[error("column `{column}`: index {index} out of range (limit {limit})")]
    IndexOutOfRange { column: String, index: u32, limit: u32 },
    #[error("invalid vocabulary: {0}")]
    InvalidVocab(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    ShapeMismatch { context: &'static str, expected: usize, found: usize },
    #[error("hidden width {width} cannot represent the {needed} degrees required")]
    HiddenTooNarrow { width: usize, needed: usize },
    #[error("non-finite loss at batch row {batch_index}")]
    NonFiniteLoss { batch_index: usize },
    #[error("non-finite gradient at parameter {index}")]
    NonFiniteGradient { index: usize },
    #[error("training diverged at epoch {epoch}, step {step}: loss {loss}")]
    Divergence { epoch: usize, step: usize, loss: f64 },
    #[error("position {position} out of range (valid {valid})")]
    PositionOutOfRange { position: usize, valid: String },
    #[error("skipping requires a model trained with input masking")]
    SkippingUnsupported,
    #[error("sample budget must be positive (got {0})")]
    ZeroBudget(usize),
    #[error("empty region for column `{0}`")]
    EmptyRegion(String),
    #[error("parse error at position {position} near `{token}`: {message}")]
    Parse { position: usize, token: String, message: String },
    #[error("workload generation gave up after {0} tries")]
    WorkloadRejection(usize),
    #[error("negative or non-finite input: {0}")]
    InvalidNumber(f64),
    #[error("empty input")]
    EmptyInput,
    #[error("estimator `{estimator}` cannot run: {reason}")]
    EstimatorMismatch { estimator: String, reason: String },
}

fn row_prefix(row: Option<usize>) -> String {
    match row {
        Some(r) => alloc::format!("row {r}: "),
        None => String::new(),
    }
}
