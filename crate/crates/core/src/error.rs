use thiserror::Error;

use crate::structures::Element;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid class parameters n={n} r={r}: need n >= 2 and 0 < r < n")]
    InvalidParams { n: usize, r: usize },

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("elements not in the universe: {}", fmt_elements(.0))]
    NotInUniverse(Vec<Element>),

    #[error("{what}: {size} elements exceeds the limit of {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A property the constructions are meant to guarantee did not hold.
    #[error("internal assertion failed: {0}")]
    Assertion(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

fn fmt_elements(v: &[Element]) -> String {
    v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
