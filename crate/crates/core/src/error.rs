use thiserror::Error;

use crate::exactness::ExactnessReport;
use crate::module::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("field mismatch: GF({left}) vs GF({right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("dimension mismatch in {op}: {left} vs {right}")]
    DimensionMismatch {
        op: &'static str,
        left: usize,
        right: usize,
    },
    #[error("subspace is not contained in the enclosing space")]
    NotContained,
    #[error("points are not ordered: {s} is not below {t}")]
    NotOrdered { s: String, t: String },
    #[error("index {index} out of range 1..={max} on axis {axis}")]
    IndexOutOfRange {
        axis: usize,
        index: usize,
        max: usize,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid block: {0}")]
    InvalidBlock(String),
    #[error("point {point} is not inside {region}")]
    PointOutside { point: String, region: String },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("diagram does not commute: {0}")]
    NotCommutative(String),
    #[error("module is not a valid functor ({} problems)", .0.problems.len())]
    InvalidModule(Box<ValidationReport>),
    #[error("module is not 3-parameter strongly exact ({} failures)", .0.failure_count())]
    NotStronglyExact(Box<ExactnessReport>),
    #[error("{location}: {message}")]
    Format { location: String, message: String },
    #[error("perturbation budget exhausted after {0} attempts")]
    PerturbBudgetExhausted(usize),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn format(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            location: location.into(),
            message: message.into(),
        }
    }
}
