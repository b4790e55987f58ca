use thiserror::Error;

/// Errors produced by graph construction, the algorithms, and file IO.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate pair {0}-{1}")]
    DuplicatePair(String, String),
    #[error("duplicate node {0}")]
    DuplicateNode(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("self-loop on {0}")]
    SelfLoop(String),
    #[error("directed cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("graph is not a DAG: it has {0} undirected edges")]
    NotFullyOriented(usize),
    #[error("graph has directed arcs where an undirected graph was expected")]
    NotUndirected,
    #[error("graph is not chordal: chordless cycle {}", .0.join(" - "))]
    NotChordal(Vec<String>),
    #[error("graph is not connected")]
    Disconnected,
    #[error("need at least {needed} nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },
    #[error("orientation conflict on {0}-{1}: Meek rules force both directions")]
    MeekConflict(String, String),
    #[error("no consistent DAG extension exists")]
    NoConsistentExtension,
    #[error("cap of {cap} exceeded after {found} items")]
    CapExceeded { cap: usize, found: usize },
    #[error("arc {0}->{1} is not a covered edge")]
    NotCovered(String, String),
    #[error("arc {0}->{1} is not in the graph")]
    MissingArc(String, String),
    #[error("graphs are not Markov equivalent")]
    NotSameMec,
    #[error("node sets differ")]
    NodeSetMismatch,
    #[error("ordering is not valid for the graph")]
    InvalidOrdering,
    #[error("intervention of size {size} exceeds the bound {bound}")]
    OversizedIntervention { size: usize, bound: usize },
    #[error("advice is not consistent with the observational essential graph")]
    InconsistentAdvice,
    #[error("empty seed set with {0} covered edges to reach")]
    EmptySeed(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
