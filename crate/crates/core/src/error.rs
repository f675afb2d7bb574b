use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent caller input.
    #[error("invalid input: {0}")]
    Input(String),

    /// Text input that could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A quantity that is undefined for the given arguments (division by zero edges, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Exhaustive enumeration would exceed its state budget.
    #[error("enumeration of {states} states exceeds budget of {budget}")]
    Size { states: u128, budget: u64 },

    /// Hyperparameter or manifest configuration problem.
    #[error("configuration error: {0}")]
    Config(String),

    /// No zero-cost coloring was found for any attempted color count.
    #[error("no feasible coloring found up to q = {q_max} (best attempt: q = {best_q}, cost = {best_cost})")]
    Exhausted {
        q_max: usize,
        best_q: usize,
        best_cost: u64,
        best_coloring: Vec<usize>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
