use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter generation config: {0}")]
    InvalidConfig(String),

    #[error("parameter generation gave up after {0} candidates")]
    GenerationTimeout(u64),

    #[error("invalid group parameters: {0}")]
    InvalidParams(String),

    #[error("payload out of encodable range [1, Q]")]
    PayloadOutOfRange,

    #[error("message encoding requires safe-prime parameters (gamma = 2, P = 3 mod 4)")]
    NotSafePrime,

    #[error("value is not an element of the order-Q subgroup")]
    NotInSubgroup,

    #[error("scalar out of range [0, Q)")]
    ScalarOutOfRange,

    #[error("zero has no modular inverse")]
    NoInverse,

    #[error("keys or ciphertext belong to different group parameters")]
    ParamsMismatch,

    #[error("choice index {index} out of range for {n} items")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("empty payload list")]
    EmptyPayloads,

    #[error("session id mismatch")]
    UnknownSession,

    #[error("unexpected {message} in state {state}")]
    UnexpectedMessage {
        message: &'static str,
        state: &'static str,
    },

    #[error("peer reported error: {0}")]
    Remote(String),

    #[error("malformed wire data: {0}")]
    Wire(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("oracle guard: {0}")]
    OracleGuard(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the underlying I/O rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}
