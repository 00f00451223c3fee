//! Durable evaluation records for the descriptive evaluation engine.
//!
//! Every accepted record is appended as one JSON line to a log file and
//! synced to disk before it is acknowledged. Student states are never
//! stored: they are derived by folding the log through
//! [`fdes_core::FdesEngine::apply_record`], so replaying the same bytes always
//! reproduces the same states bit for bit.

mod error;
pub mod http;
pub mod log;
pub mod store;

pub use error::StoreError;
pub use log::{LogEntry, RecordLog};
pub use store::{replay, AppendOutcome, EvalStore, RosterEntry, StudentRoster, TimelinePoint};
