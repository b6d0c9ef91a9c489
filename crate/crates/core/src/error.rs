use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaccError {
    /// Network parameters violate a model invariant.
    #[error("invalid network parameters: {0}")]
    InvalidParams(String),

    /// A construction or operation was called outside its admissible range.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Array dimensions, tokens or labels are inconsistent.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The channel realization does not admit a zero-forcing precoder.
    #[error("degenerate channel for integer {s} at row {row}: {detail}; redraw the channel")]
    DegenerateChannel { s: u32, row: usize, detail: String },

    #[error("search budget exceeded: k*f = {needed} > budget {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
}

pub type Result<T> = std::result::Result<T, MaccError>;
