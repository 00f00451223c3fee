//! Newline-delimited JSON record log.
//!
//! One record per line, fields in a fixed order, crisp values written with
//! exactly six fraction digits:
//!
//! ```text
//! {"seq":1,"student":"s-01","indicator":"A","day":1,"value":"G","note":""}
//! {"seq":2,"student":"s-01","indicator":"B","day":31,"value":16.250000,"note":"quiz"}
//! ```
//!
//! Sequence numbers are dense from 1. Every line, including the last, ends
//! with `\n`; a missing terminator means the write was cut short.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use fdes_core::{EvaluationRecord, IndicatorId, RecordValue};
use serde::Deserialize;

use crate::error::StoreError;

#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub seq: u64,
    pub record: EvaluationRecord,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    seq: u64,
    student: String,
    indicator: IndicatorId,
    day: u16,
    value: RecordValue,
    note: String,
}

/// Rounds a crisp value to the six-digit form it takes in the log.
pub fn canonical_value(value: RecordValue) -> RecordValue {
    match value {
        RecordValue::Crisp(x) if x.is_finite() => {
            RecordValue::Crisp(serde_json::from_str(&format!("{x:.6}")).expect("formatted float parses"))
        }
        other => other,
    }
}

pub fn encode_line(entry: &LogEntry) -> String {
    let r = &entry.record;
    let value = match r.value {
        RecordValue::Crisp(x) => format!("{x:.6}"),
        RecordValue::Term(l) => format!("\"{l}\""),
    };
    format!(
        "{{\"seq\":{},\"student\":{},\"indicator\":\"{}\",\"day\":{},\"value\":{},\"note\":{}}}\n",
        entry.seq,
        serde_json::Value::String(r.student_id.clone()),
        r.indicator,
        r.day,
        value,
        serde_json::Value::String(r.note.clone()),
    )
}

pub fn decode_line(line: &str) -> Result<LogEntry, String> {
    let raw: RawEntry = serde_json::from_str(line).map_err(|e| e.to_string())?;
    Ok(LogEntry {
        seq: raw.seq,
        record: EvaluationRecord {
            student_id: raw.student,
            indicator: raw.indicator,
            day: raw.day,
            value: raw.value,
            note: raw.note,
        },
    })
}

/// Reads and validates every entry of a log file.
pub fn read_entries(path: &Path) -> Result<Vec<LogEntry>, StoreError> {
    let file = File::open(path).map_err(|e| StoreError::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut entries = Vec::new();
    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader
            .read_line(&mut buf)
            .map_err(|e| StoreError::Corrupt {
                line: line_no + 1,
                reason: e.to_string(),
            })?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let Some(body) = buf.strip_suffix('\n') else {
            return Err(StoreError::Corrupt {
                line: line_no,
                reason: "truncated line (missing newline terminator)".into(),
            });
        };
        let entry = decode_line(body).map_err(|reason| StoreError::Corrupt {
            line: line_no,
            reason,
        })?;
        let expected = entries.len() as u64 + 1;
        if entry.seq != expected {
            return Err(StoreError::Corrupt {
                line: line_no,
                reason: format!("sequence number {} where {expected} was expected", entry.seq),
            });
        }
        entries.push(entry);
    }
    Ok(entries)
}

/// Single-appender handle on a log file.
#[derive(Debug)]
pub struct RecordLog {
    path: PathBuf,
    file: File,
    next_seq: u64,
}

impl RecordLog {
    /// Opens (creating if needed) the log and returns the entries already in it.
    pub fn open(path: &Path) -> Result<(Self, Vec<LogEntry>), StoreError> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| StoreError::io(path, e))?;
        let entries = read_entries(path)?;
        let log = Self {
            path: path.to_path_buf(),
            file,
            next_seq: entries.len() as u64 + 1,
        };
        Ok((log, entries))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }

    /// Writes one line and syncs it to disk; returns its sequence number.
    pub fn append(&mut self, record: &EvaluationRecord) -> Result<u64, StoreError> {
        let entry = LogEntry {
            seq: self.next_seq,
            record: record.clone(),
        };
        let line = encode_line(&entry);
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.sync_data())
            .map_err(|e| StoreError::io(&self.path, e))?;
        self.next_seq += 1;
        Ok(entry.seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fdes_core::TermLabel;
    use proptest::prelude::*;

    fn record(value: RecordValue, note: &str) -> EvaluationRecord {
        EvaluationRecord {
            student_id: "s-01".into(),
            indicator: IndicatorId::B,
            day: 31,
            value,
            note: note.into(),
        }
    }

    #[test]
    fn line_format() {
        let e = LogEntry {
            seq: 2,
            record: record(RecordValue::Crisp(16.25), "quiz"),
        };
        assert_eq!(
            encode_line(&e),
            "{\"seq\":2,\"student\":\"s-01\",\"indicator\":\"B\",\"day\":31,\"value\":16.250000,\"note\":\"quiz\"}\n"
        );
        let e = LogEntry {
            seq: 1,
            record: record(RecordValue::Term(TermLabel::Good), "say \"hi\"\nthere"),
        };
        let line = encode_line(&e);
        assert!(line.contains("\"value\":\"G\""));
        assert_eq!(line.matches('\n').count(), 1);
        assert_eq!(decode_line(line.trim_end()).unwrap(), e);
    }

    #[test]
    fn decode_rejects_garbage() {
        assert!(decode_line("{\"seq\":1}").is_err());
        assert!(decode_line("{\"seq\":1,\"student\":\"a\",\"indicator\":\"Q\",\"day\":1,\"value\":1.0,\"note\":\"\"}").is_err());
        assert!(decode_line("{\"seq\":1,\"student\":\"a\",\"indicator\":\"A\",\"day\":1,\"value\":1.0,\"note\":\"\",\"x\":1}").is_err());
        assert!(decode_line("not json").is_err());
    }

    #[test]
    fn append_and_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.ndjson");
        let (mut log, entries) = RecordLog::open(&path).unwrap();
        assert!(entries.is_empty());
        assert_eq!(log.append(&record(RecordValue::Crisp(12.0), "")).unwrap(), 1);
        assert_eq!(log.append(&record(RecordValue::Term(TermLabel::VeryGood), "")).unwrap(), 2);
        drop(log);
        let (log, entries) = RecordLog::open(&path).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(log.next_seq(), 3);
        assert_eq!(entries[1].record.value, RecordValue::Term(TermLabel::VeryGood));
    }

    #[test]
    fn truncated_last_line_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.ndjson");
        let mut text = String::new();
        for seq in 1..=3 {
            text += &encode_line(&LogEntry { seq, record: record(RecordValue::Crisp(15.0), "") });
        }
        text.truncate(text.len() - 10);
        std::fs::write(&path, text).unwrap();
        match read_entries(&path) {
            Err(StoreError::Corrupt { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gaps_in_sequence_are_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.ndjson");
        let text = encode_line(&LogEntry { seq: 1, record: record(RecordValue::Crisp(15.0), "") })
            + &encode_line(&LogEntry { seq: 3, record: record(RecordValue::Crisp(15.0), "") });
        std::fs::write(&path, text).unwrap();
        assert!(matches!(read_entries(&path), Err(StoreError::Corrupt { line: 2, .. })));
    }

    proptest! {
        #[test]
        fn canonical_values_survive_the_log(x in -1e6f64..1e6, note in ".{0,40}") {
            let value = canonical_value(RecordValue::Crisp(x));
            let e = LogEntry { seq: 7, record: record(value, &note) };
            let line = encode_line(&e);
            let back = decode_line(line.strip_suffix('\n').unwrap()).unwrap();
            prop_assert_eq!(&back, &e);
            prop_assert_eq!(encode_line(&back), line);
        }
    }
}
