use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("log line {line}: {reason}")]
    Corrupt { line: usize, reason: String },

    #[error("student {student}: day {day} is before the last recorded day {last_day}")]
    OutOfOrder {
        student: String,
        day: u16,
        last_day: u16,
    },

    #[error("invalid record: {0}")]
    Invalid(String),

    #[error(transparent)]
    Engine(#[from] fdes_core::Error),
}

impl StoreError {
    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        StoreError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}
