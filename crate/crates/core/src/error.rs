use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("edge cover infeasible: vertex {vertex} is isolated")]
    Infeasible { vertex: usize },

    #[error("instance too large for exhaustive search: {what} = {got} exceeds cap {cap}")]
    TooLarge { what: &'static str, got: usize, cap: usize },

    #[error("tree size cap exceeded: more than {cap} nodes")]
    TreeSizeCap { cap: usize },

    #[error("neighborhood of vertex {root} at depth {depth} is not a tree")]
    NotATree { root: usize, depth: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("degenerate sample: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
