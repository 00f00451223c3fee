//! Fuzzy descriptive evaluation engine.
//!
//! Teacher propositions about a student are crisp scores or one of the four
//! descriptive phrases (NME, AE, G, VG). Each course indicator folds its
//! time-ordered propositions through a two-input Mamdani system whose rule
//! table favours the newer evaluation; the five indicator outputs are then
//! chained through four combiners that favour the accumulated value, giving a
//! single crisp grade that is rounded to the nearest phrase for reporting.
//!
//! Modules, bottom-up:
//!
//! - [`fuzzy`]: universes, Gaussian terms, 4x4 rule bases, inference, defuzzifiers.
//! - [`aggregation`]: the two-input system, open-loop fold, feedback accumulator, rule counts.
//! - [`calendar`] and [`engine`]: the school year and the five-indicator cascade.
//! - [`simulation`]: scenario and school-year experiments with CSV export.
//! - [`check`]: the invariant suite shared by the CLI and the acceptance tests.

pub mod aggregation;
pub mod calendar;
pub mod check;
pub mod config;
pub mod engine;
mod error;
pub mod fuzzy;
pub mod simulation;

pub use aggregation::{
    fold_open_loop, rule_count, AccumulatorMode, Defuzzifier, IndicatorAccumulator, PsiSystem,
    RuleCountReport,
};
pub use calendar::{day_of, month_of, Month, DAYS_PER_MONTH, SCHOOL_DAYS};
pub use engine::{
    EvaluationRecord, FdesEngine, FdesState, FinalOut, IndicatorId, RecordValue, Report,
};
pub use error::{Error, Result};
pub use fuzzy::{
    Clamped, FuzzyOutput, LinguisticTerm, LinguisticVariable, RuleBase4x4, TermLabel,
    UniverseSpec,
};
