use alloc::string::String;
use alloc::vec::Vec;

/// Every failure the solver can report. Variants carry enough context to
/// produce a one-line diagnostic.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown identifier '{name}' at column {column}")]
    UnknownIdentifier { name: String, column: usize },
    #[error("evaluation singularity at x = {x}")]
    Singularity { x: f64 },
    #[error("evaluation singularity at node {node} (x = {x})")]
    NodeSingularity { node: usize, x: f64 },
    #[error("particular solution vanishes at node {node} (x = {x})")]
    Vanishing { node: usize, x: f64 },
    #[error("weighted integral over cell {cell} is not finite")]
    SingularCell { cell: usize },
    #[error("requested accuracy {requested:e} unreachable; achieved bound {achieved:e}")]
    Accuracy { requested: f64, achieved: f64 },
    #[error("root finder did not converge after {sweeps} sweeps")]
    RootFinding { sweeps: usize, partial: Vec<(f64, f64)> },
    #[error("no new trusted eigenvalues in round {round}; increase N (powers) or M (grid)")]
    Stagnation { round: usize },
    #[error("unsupported boundary condition: {0}")]
    Unsupported(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
