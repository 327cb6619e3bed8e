use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order {order} outside supported range (max {max})")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("value {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("sample is empty")]
    EmptySample,

    /// A transformed observation landed on a boundary the statistic cannot handle.
    #[error("observation {index} equals boundary value {value}")]
    Boundary { index: usize, value: f64 },

    #[error("observation {index} is not finite")]
    NonFinite { index: usize },

    #[error("tied observations at value {value}")]
    Tie { value: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("s = {s} is a pole of the moment generating function")]
    Pole { s: f64 },

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("critical value inversion failed: {0}")]
    Inversion(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{path}, line {line}: {}", source.detail())]
    AtLine { path: String, line: usize, source: Box<Error> },
}

impl Error {
    fn detail(&self) -> String {
        match self {
            Error::Parse { message, .. } => message.clone(),
            e => e.to_string(),
        }
    }

    /// The underlying error with any location wrapper removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } => source.root(),
            e => e,
        }
    }
}
