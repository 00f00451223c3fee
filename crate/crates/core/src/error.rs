use thiserror::Error;

/// Errors produced by the fuzzy engine, the FDES cascade and the simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input must be finite, got {0}")]
    NonFinite(f64),

    #[error("invalid universe [{lo}, {hi}] with resolution {resolution}: {reason}")]
    InvalidUniverse {
        lo: f64,
        hi: f64,
        resolution: usize,
        reason: &'static str,
    },

    #[error("invalid linguistic variable: {0}")]
    InvalidVariable(String),

    #[error("rule table is not monotone at row {row}, column {col}")]
    NonMonotoneRules { row: usize, col: usize },

    #[error("cannot defuzzify: every consequent weight is zero")]
    ZeroWeights,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("day {day} is outside the school year 1..={max}")]
    DayOutOfRange { day: i64, max: u16 },

    #[error("record for day {day} arrives after day {last_day} was already applied")]
    OutOfOrder { day: u16, last_day: u16 },

    #[error("no evaluation records have been applied yet")]
    NoData,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
