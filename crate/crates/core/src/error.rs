use thiserror::Error;

/// Errors produced by the decomposition library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("horizontal half-dimension must be at least 1, got {0}")]
    InvalidDimension(i64),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("degenerate horizontal dimension: component {index} needs n >= 2")]
    DegenerateHorizontal { index: usize },

    #[error("domain violation for L{operator}: condition `{condition}` fails with residual {residual:.3e}")]
    DomainViolation {
        operator: usize,
        condition: &'static str,
        residual: f64,
    },

    #[error("not in constraint space: membership residual {residual:.3e}")]
    NotInSpace { residual: f64 },

    #[error("rank not stabilized for component {index} after {seeds} seeds (rank {rank}); supply more seeds")]
    RankNotStabilized {
        index: usize,
        seeds: usize,
        rank: usize,
    },

    #[error("singular metric at point")]
    SingularMetric,

    #[error("structure validation failed (max residual {residual:.3e}): {violated:?}")]
    InvalidStructure {
        violated: Vec<String>,
        residual: f64,
    },

    #[error("unknown chart `{0}`")]
    UnknownChart(String),

    #[error("expected {expected} residuals, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
