use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure raised by a user-supplied fitness callback.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallbackError(pub String);

impl CallbackError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for CallbackError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid parameter or parameter combination.
    Config(String),
    /// Malformed textual input (custom FOS, instance files, linkage specs).
    /// `line` is 1-based; 0 when the input is not line oriented.
    Parse { line: usize, message: String },
    /// An operation was called outside its precondition.
    Contract(String),
    /// A subfunction callback failed.
    Subfunction { index: usize, source: CallbackError },
    /// An objective or constraint callback failed.
    Callback(CallbackError),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(m) => write!(f, "configuration error: {m}"),
            Error::Parse { line: 0, message } => write!(f, "parse error: {message}"),
            Error::Parse { line, message } => write!(f, "parse error on line {line}: {message}"),
            Error::Contract(m) => write!(f, "contract violation: {m}"),
            Error::Subfunction { index, source } => {
                write!(f, "subfunction {index} failed: {source}")
            }
            Error::Callback(e) => write!(f, "fitness callback failed: {e}"),
        }
    }
}

impl core::error::Error for Error {}
impl core::error::Error for CallbackError {}
