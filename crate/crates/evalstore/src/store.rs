//! In-memory student states backed by the record log.

use std::collections::BTreeMap;
use std::path::Path;

use fdes_core::{
    EvaluationRecord, FdesEngine, FdesState, RecordValue, TermLabel, SCHOOL_DAYS,
};
use serde::Serialize;

use crate::error::StoreError;
use crate::log::{canonical_value, read_entries, LogEntry, RecordLog};

pub const DEFAULT_COURSE: &str = "Mathematics, grade 3";

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RosterEntry {
    pub display_name: String,
    pub course: String,
}

/// Known students, keyed by id.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StudentRoster {
    entries: BTreeMap<String, RosterEntry>,
}

impl StudentRoster {
    pub fn get(&self, id: &str) -> Option<&RosterEntry> {
        self.entries.get(id)
    }

    /// Adds `id` with default details unless it is already known.
    pub fn ensure(&mut self, id: &str, course: &str) -> &RosterEntry {
        self.entries.entry(id.to_string()).or_insert_with(|| RosterEntry {
            display_name: id.to_string(),
            course: course.to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone)]
struct StudentEntry {
    state: FdesState,
    history: Vec<LogEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppendOutcome {
    pub seq: u64,
    /// The crisp value fell outside the universe and was clamped.
    pub clamped: bool,
    pub state: FdesState,
}

/// State after the last record of one day.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelinePoint {
    pub day: u16,
    pub indicators: [Option<f64>; 5],
    pub chain: [Option<f64>; 4],
    pub final_value: Option<f64>,
    pub final_term: Option<TermLabel>,
}

/// Log-backed store. Appends are serialized by `&mut self`; the caller
/// shares it behind a lock.
#[derive(Debug)]
pub struct EvalStore {
    engine: FdesEngine,
    log: RecordLog,
    students: BTreeMap<String, StudentEntry>,
    roster: StudentRoster,
    course: String,
}

impl EvalStore {
    /// Opens the log at `path` and rebuilds every student's state from it.
    pub fn open(engine: FdesEngine, path: &Path) -> Result<Self, StoreError> {
        let (log, entries) = RecordLog::open(path)?;
        let mut store = Self {
            engine,
            log,
            students: BTreeMap::new(),
            roster: StudentRoster::default(),
            course: DEFAULT_COURSE.to_string(),
        };
        for (i, entry) in entries.into_iter().enumerate() {
            let current = store.entry_for(&entry.record.student_id).state.clone();
            let state = store
                .engine
                .apply_record(&current, &entry.record)
                .map_err(|e| StoreError::Corrupt {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            store.commit(entry, state);
        }
        Ok(store)
    }

    fn entry_for(&mut self, id: &str) -> &StudentEntry {
        self.roster.ensure(id, &self.course);
        let empty = self.engine.empty_state();
        self.students.entry(id.to_string()).or_insert_with(|| StudentEntry {
            state: empty,
            history: Vec::new(),
        })
    }

    fn commit(&mut self, entry: LogEntry, state: FdesState) {
        let student = self
            .students
            .get_mut(&entry.record.student_id)
            .expect("student registered before commit");
        student.state = state;
        student.history.push(entry);
    }

    pub fn engine(&self) -> &FdesEngine {
        &self.engine
    }

    pub fn roster(&self) -> &StudentRoster {
        &self.roster
    }

    pub fn log_path(&self) -> &Path {
        self.log.path()
    }

    /// Validates, durably appends and applies one record.
    ///
    /// Nothing is written when the record is rejected.
    pub fn append(&mut self, record: EvaluationRecord) -> Result<AppendOutcome, StoreError> {
        if record.student_id.trim().is_empty() {
            return Err(StoreError::Invalid("student id must not be empty".into()));
        }
        if let RecordValue::Crisp(x) = record.value {
            if !x.is_finite() {
                return Err(StoreError::Invalid(format!("value must be finite, got {x}")));
            }
        }
        let record = EvaluationRecord {
            value: canonical_value(record.value),
            ..record
        };
        let current = self
            .students
            .get(&record.student_id)
            .map(|s| s.state.clone())
            .unwrap_or_else(|| self.engine.empty_state());
        let clamped = self.engine.resolve_value(record.value)?.was_clamped;
        let next = self.engine.apply_record(&current, &record).map_err(|e| match e {
            fdes_core::Error::OutOfOrder { day, last_day } => StoreError::OutOfOrder {
                student: record.student_id.clone(),
                day,
                last_day,
            },
            other => StoreError::Engine(other),
        })?;
        let seq = self.log.append(&record)?;
        self.entry_for(&record.student_id);
        self.commit(LogEntry { seq, record }, next.clone());
        Ok(AppendOutcome {
            seq,
            clamped,
            state: next,
        })
    }

    pub fn state(&self, student_id: &str) -> Option<&FdesState> {
        self.students.get(student_id).map(|s| &s.state)
    }

    pub fn states(&self) -> BTreeMap<String, FdesState> {
        self.students
            .iter()
            .map(|(k, v)| (k.clone(), v.state.clone()))
            .collect()
    }

    pub fn history(&self, student_id: &str) -> Option<&[LogEntry]> {
        self.students.get(student_id).map(|s| s.history.as_slice())
    }

    /// Replays one student's records and reports the state at the end of
    /// every recorded day in `from..=to`.
    pub fn timeline(&self, student_id: &str, from: u16, to: u16) -> Option<Result<Vec<TimelinePoint>, StoreError>> {
        let history = self.history(student_id)?;
        Some(timeline_of(&self.engine, history, from, to))
    }
}

fn timeline_of(
    engine: &FdesEngine,
    history: &[LogEntry],
    from: u16,
    to: u16,
) -> Result<Vec<TimelinePoint>, StoreError> {
    let to = to.min(SCHOOL_DAYS);
    let mut state = engine.empty_state();
    let mut points: Vec<TimelinePoint> = Vec::new();
    for entry in history {
        state = engine.apply_record(&state, &entry.record)?;
        let day = entry.record.day;
        if day < from || day > to {
            continue;
        }
        let point = TimelinePoint {
            day,
            indicators: state.indicator_outputs(),
            chain: state.chain(),
            final_value: state.final_value(),
            final_term: engine.final_out(&state).ok().map(|f| f.term),
        };
        match points.last_mut() {
            Some(last) if last.day == day => *last = point,
            _ => points.push(point),
        }
    }
    Ok(points)
}

/// Folds a log file into per-student states without opening it for writing.
pub fn replay(engine: &FdesEngine, path: &Path) -> Result<BTreeMap<String, FdesState>, StoreError> {
    let mut states: BTreeMap<String, FdesState> = BTreeMap::new();
    for (i, entry) in read_entries(path)?.into_iter().enumerate() {
        let state = states
            .entry(entry.record.student_id.clone())
            .or_insert_with(|| engine.empty_state());
        *state = engine
            .apply_record(state, &entry.record)
            .map_err(|e| StoreError::Corrupt {
                line: i + 1,
                reason: e.to_string(),
            })?;
    }
    Ok(states)
}
