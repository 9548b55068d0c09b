use thiserror::Error;

/// A single violated invariant found while validating a problem description.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("matrix {name} is not square ({rows}x{cols}, ragged={ragged})")]
    NonSquareMatrix {
        name: String,
        rows: usize,
        cols: usize,
        ragged: bool,
    },
    #[error("{what} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("delay #{index} = {value} is not strictly positive")]
    NonPositiveDelay { index: usize, value: f64 },
    #[error("non-finite entry in {what}")]
    NonFiniteEntry { what: String },
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("singular symbol at mode(s) {0:?}")]
    SingularMode(Vec<i64>),
    #[error("mode {0} is degenerate for the factored variation identity")]
    DegenerateMode(i64),
    #[error("sample count {samples} is below 2K+1 = {}", 2 * .max_mode + 1)]
    WindowTooSmall { samples: usize, max_mode: usize },
    #[error("forcing has mode {max_mode} beyond truncation {truncation}")]
    TruncationTooSmall { max_mode: usize, truncation: usize },
    #[error("the zero mode is excluded from the antiderivative identity")]
    ZeroModeRequested,
    #[error("operator family is empty")]
    EmptyFamily,
    #[error("quadrature underresolved: halving panels changed the result by {disagreement:e}")]
    QuadratureUnderresolved { disagreement: f64 },
    #[error("step {dt} exceeds min delay / 4 = {limit}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("trajectory diverged at t = {t} (norm above 1e12)")]
    Divergence { t: f64 },
    #[error("oracle did not contract: per-period rate {rate} > 0.9")]
    OracleNotConverged { rate: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
