use thiserror::Error;

use crate::cube::Vertex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension {n} exceeds the limit of {limit}")]
    DimensionTooLarge { n: usize, limit: usize },

    #[error("face has several sinks, for example {first} and {second}")]
    MultipleSinks { first: Vertex, second: Vertex },

    #[error("inherited orientation undefined: co-face through {base} spanned by {dims:#b} has {sinks} sinks")]
    InheritedUndefined {
        base: Vertex,
        dims: u32,
        sinks: usize,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error(
        "projection along dimension {dim} is ill-defined (known vertices {u} and {v} disagree)"
    )]
    IllDefinedProjection { dim: usize, u: Vertex, v: Vertex },

    #[error("aborted: {0}")]
    Aborted(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
