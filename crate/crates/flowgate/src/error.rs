use std::io;
use std::path::PathBuf;

use flowgate_core::engine::EngineError;
use flowgate_core::topology::TopologyError;

/// Syntax or value error at a line of an input file.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, message: message.into() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: {message}", path.display())]
    Invalid { path: PathBuf, message: String },
    #[error("topology: {0}")]
    Topology(#[from] TopologyError),
    #[error("simulation setup: {0}")]
    Engine(#[from] EngineError),
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("cannot encode report: {0}")]
    Encode(String),
    #[error("{0}")]
    Internal(String),
}

impl Error {
    /// 1 for problems with the inputs, 2 for failures on our side.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Read { .. } | Error::Parse { .. } | Error::Invalid { .. } | Error::Topology(_) | Error::Engine(_) => 1,
            Error::Write { .. } | Error::Encode(_) | Error::Internal(_) => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
