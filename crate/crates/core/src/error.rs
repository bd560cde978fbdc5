use thiserror::Error;

/// Errors surfaced by the premium, norm, and experiment engines.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// The variable has no finite Luxemburg norm for the requested gauge, so
    /// premium-style functionals are undefined on it.
    #[error("variable is not a member of the Orlicz space for this gauge")]
    NotInLPhi,

    /// Adaptive quadrature could neither settle on a finite value nor certify
    /// divergence within its refinement budget.
    #[error("quadrature inconclusive while computing {context}")]
    Inconclusive { context: String },

    /// The Δ2 scan saw Φ(x) = 0 on the whole range (x_lo sits below the kink).
    #[error("degenerate Δ2 scan: {0}")]
    DegenerateScan(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// A tail integral of the quantile function diverges.
    #[error("divergent tail integral; variable is not integrable on the requested range")]
    DivergentTail,

    #[error("atom limit exceeded: {actual} atoms, limit {limit}")]
    AtomLimit { limit: usize, actual: usize },

    #[error("sequence mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("sequence element outside the Young class: {0}")]
    YoungClassViolation(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
