use thiserror::Error;

/// Errors shared across the capacity-planning pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument is outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Structured input (graph, table, plan, trace) violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The operation requires a connected graph.
    #[error("graph is not connected")]
    Disconnected,

    /// A pmf's retained mass is below the requested criterion; the caller
    /// must lower epsilon (raising per-pair Q) before allocating.
    #[error("retained pmf mass {retained} on edge {edge} is below criterion {criterion}; lower epsilon to keep more mass")]
    TruncationInsufficient {
        edge: String,
        retained: f64,
        criterion: f64,
    },

    /// Shortest-path counts exceeded the 128-bit accumulator.
    #[error("shortest-path count overflow for pair ({from}, {to})")]
    PathCountOverflow { from: usize, to: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
