use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing input file referenced by configuration: {0}")]
    MissingInput(PathBuf),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("invalid concept code {0:?}")]
    InvalidConceptCode(String),

    #[error("year {0} has no records in the corpus")]
    UnknownYear(i32),

    #[error("networks do not share the same node universe: {0}")]
    UniverseMismatch(String),

    #[error("nodes without a first-level category: {0:?}")]
    UnmappedNodes(Vec<String>),

    #[error("network is empty")]
    EmptyNetwork,

    #[error("network is disconnected ({components} components); use largest-component mode")]
    Disconnected { components: usize },

    #[error("total link weight is zero; modularity undefined")]
    ZeroWeight,

    #[error("GCC undefined: network has no open or closed triads")]
    GccUndefined,

    #[error("assortativity undefined: endpoint strengths have zero variance")]
    AssortativityUndefined,

    #[error("regression slope undefined: predictor has zero variance")]
    UndefinedSlope,

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("degenerate tail: every tail sample equals x_min")]
    DegenerateTail,

    #[error("no inner core: no LCC of size in [2, {target}] occurs on the grid")]
    NoInnerCore { target: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("remote fetch failed: {0}")]
    Fetch(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::MissingInput(_) | Error::InvalidArgument(_) => {
                ErrorClass::Config
            }
            Error::Disconnected { .. }
            | Error::ZeroWeight
            | Error::GccUndefined
            | Error::AssortativityUndefined
            | Error::UndefinedSlope
            | Error::InsufficientSamples { .. }
            | Error::DegenerateTail
            | Error::NoInnerCore { .. }
            | Error::EmptyNetwork => ErrorClass::Numeric,
            _ => ErrorClass::Data,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
