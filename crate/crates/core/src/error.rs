use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite preference at index {index}: {value}")]
    NonFinitePreference { index: usize, value: f64 },

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("sampled arm {index} has zero probability")]
    ZeroProbability { index: usize },

    #[error("index {index} out of range for {len} actions")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("payoff {value} outside [-{g_max}, 0]")]
    PayoffOutOfRange { value: f64, g_max: f64 },

    #[error("implicit exploration parameter {0} outside [0, 1]")]
    InvalidEta(f64),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite gradient entry at index {index}")]
    NonFiniteGradient { index: usize },

    #[error("trace window is not ready: {0}")]
    WindowNotReady(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("run diverged at step {step}: {reason}")]
    Diverged { step: u64, reason: String },

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
