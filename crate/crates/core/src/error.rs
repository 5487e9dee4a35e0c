use thiserror::Error;

/// Errors surfaced by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// Model parameters violate a standing assumption (e.g. `b^2 < 4 m^2`).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A sweep/CLI configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A formula is outside its stated range of applicability.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// An integration stalled without reaching a conclusive state.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
