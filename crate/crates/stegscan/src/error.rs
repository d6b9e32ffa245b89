use std::path::PathBuf;

/// Unified error type for the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed container: {0}")]
    MalformedContainer(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("payload needs {needed} bits but carrier offers {available}")]
    CapacityExceeded { needed: u64, available: u64 },

    #[error("stream carries no ID3v2 tag")]
    NoId3Tag,

    #[error("bad payload frame magic")]
    BadMagic,

    #[error("payload frame CRC mismatch (stored {stored:08x}, computed {computed:08x})")]
    CrcMismatch { stored: u32, computed: u32 },

    #[error("payload frame truncated")]
    TruncatedFrame,

    #[error("signal too short: {got} samples, need at least {need}")]
    TooShort { need: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("file timestamps unavailable")]
    MissingTimestamps,

    #[error("duplicate name in hash database: {0}")]
    DuplicateName(String),

    #[error("archive entry uses unsupported encryption: {0}")]
    UnsupportedEncryption(String),

    #[error("archive contains no encrypted entries")]
    NotEncrypted,

    #[error("wordlist exhausted after {attempts} attempts")]
    Exhausted { attempts: usize },

    #[error("requested size {requested} below structural minimum {minimum}")]
    SizeTooSmall { requested: usize, minimum: usize },

    #[error("manifest/report mismatch: {0}")]
    ManifestReportMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::IoFailure {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
