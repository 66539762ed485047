use thiserror::Error;

/// Errors raised by model loading, reasoning and generation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The document is not well-formed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The document is well-formed but does not describe a valid model.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("unknown task `{0}`")]
    UnknownTask(String),

    #[error("unknown causal node `{0}`")]
    UnknownNode(String),

    #[error("node `{node}` has kind {actual}, expected {expected}")]
    WrongKind {
        node: String,
        expected: &'static str,
        actual: &'static str,
    },

    #[error("dangling task_ref `{task}` on node `{node}`")]
    DanglingTaskRef { node: String, task: String },

    #[error("scenario space of {dimensions} dimensions exceeds the cap of {cap}")]
    ModelTooLarge { dimensions: usize, cap: usize },

    #[error("a pair needs two distinct tasks, got `{0}` twice")]
    SameTask(String),

    #[error("goal state for ({0}, {1}) contains conflicting conditions")]
    ConflictingGoal(String, String),

    #[error("invalid instruction: {0}")]
    InvalidInstruction(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
