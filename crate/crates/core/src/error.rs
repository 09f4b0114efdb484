use std::path::PathBuf;
use std::time::Duration;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("dataset inconsistency: {0}")]
    Consistency(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("unsupported format version {found:?} (expected {expected:?})")]
    UnsupportedVersion { found: char, expected: char },

    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("{0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("barrier timeout after {timeout:?} in superstep {superstep}; missing peers: {missing:?}")]
    BarrierTimeout {
        timeout: Duration,
        superstep: u32,
        missing: Vec<usize>,
    },

    #[error("vertex program failed on tile {tile}, vertex {vertex}: {source}")]
    Program {
        tile: u32,
        vertex: u32,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attaches a file path to a bare I/O error.
    pub fn file(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::File { path, source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
