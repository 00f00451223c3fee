//! The five-indicator cascade.
//!
//! Every indicator owns a feedback accumulator driven by the recent-dominant
//! system. After each record the combiner chain is recomputed in curriculum
//! order with the cumulative-dominant system:
//!
//! ```text
//! y1 = c(A, B), y2 = c(y1, C), y3 = c(y2, D), y4 = c(y3, E), final = y4
//! ```
//!
//! Indicators without records are skipped: the running value passes through
//! that stage unchanged.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aggregation::{AccumulatorMode, IndicatorAccumulator, PsiSystem};
use crate::calendar::check_day;
use crate::error::{Error, Result};
use crate::fuzzy::{Clamped, LinguisticVariable, TermLabel, UniverseSpec};

/// Course indicators in curriculum order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IndicatorId {
    A,
    B,
    C,
    D,
    E,
}

impl IndicatorId {
    pub const ALL: [IndicatorId; 5] = [
        IndicatorId::A,
        IndicatorId::B,
        IndicatorId::C,
        IndicatorId::D,
        IndicatorId::E,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        match self {
            IndicatorId::A => "A",
            IndicatorId::B => "B",
            IndicatorId::C => "C",
            IndicatorId::D => "D",
            IndicatorId::E => "E",
        }
    }

    /// Third-grade mathematics skill assessed by this indicator.
    pub fn description(self) -> &'static str {
        match self {
            IndicatorId::A => "Reading, writing and comparing numbers",
            IndicatorId::B => "Measurement units and calculations",
            IndicatorId::C => "Calculating and drawing geometric shapes",
            IndicatorId::D => "Calculations and the four basic operations",
            IndicatorId::E => "Reading information from graphs and drawing conclusions",
        }
    }
}

impl fmt::Display for IndicatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for IndicatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(IndicatorId::A),
            "B" => Ok(IndicatorId::B),
            "C" => Ok(IndicatorId::C),
            "D" => Ok(IndicatorId::D),
            "E" => Ok(IndicatorId::E),
            _ => Err(Error::InvalidArgument(format!(
                "unknown indicator {s:?} (expected A..E)"
            ))),
        }
    }
}

/// A proposition's value: a crisp score or one of the four phrases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RecordValue {
    Crisp(f64),
    Term(TermLabel),
}

impl FromStr for RecordValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(label) = s.parse::<TermLabel>() {
            return Ok(RecordValue::Term(label));
        }
        s.trim()
            .parse::<f64>()
            .map(RecordValue::Crisp)
            .map_err(|_| Error::InvalidArgument(format!("value {s:?} is neither a number nor a term")))
    }
}

impl fmt::Display for RecordValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordValue::Crisp(x) => write!(f, "{x}"),
            RecordValue::Term(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub student_id: String,
    pub indicator: IndicatorId,
    pub day: u16,
    pub value: RecordValue,
    #[serde(default)]
    pub note: String,
}

/// Live evaluation state of one student in one course.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdesState {
    accumulators: [IndicatorAccumulator; 5],
    chain: [Option<f64>; 4],
    final_value: Option<f64>,
    last_update_day: Option<u16>,
    record_count: u32,
}

impl FdesState {
    pub fn new(mode: AccumulatorMode) -> Self {
        Self {
            accumulators: [IndicatorAccumulator::new(mode); 5],
            chain: [None; 4],
            final_value: None,
            last_update_day: None,
            record_count: 0,
        }
    }

    pub fn accumulator(&self, id: IndicatorId) -> &IndicatorAccumulator {
        &self.accumulators[id.index()]
    }

    /// Current indicator outputs `A_out..E_out`.
    pub fn indicator_outputs(&self) -> [Option<f64>; 5] {
        self.accumulators.map(|a| a.current())
    }

    /// Combiner outputs `y1..y4`.
    pub fn chain(&self) -> [Option<f64>; 4] {
        self.chain
    }

    pub fn final_value(&self) -> Option<f64> {
        self.final_value
    }

    pub fn last_update_day(&self) -> Option<u16> {
        self.last_update_day
    }

    pub fn record_count(&self) -> u32 {
        self.record_count
    }
}

/// Crisp final grade and its rounded phrase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalOut {
    pub crisp: f64,
    pub term: TermLabel,
}

/// Recent-dominant indicator systems plus the cumulative-dominant combiner chain.
#[derive(Debug, Clone, PartialEq)]
pub struct FdesEngine {
    psi: PsiSystem,
    combiner: PsiSystem,
    mode: AccumulatorMode,
}

impl FdesEngine {
    pub fn new(psi: PsiSystem, combiner: PsiSystem, mode: AccumulatorMode) -> Result<Self> {
        if psi.variable() != combiner.variable() {
            return Err(Error::Config(
                "indicator and combiner systems must share one linguistic variable".into(),
            ));
        }
        Ok(Self {
            psi,
            combiner,
            mode,
        })
    }

    /// Default engine on `universe`: standard terms, recent-dominant
    /// indicators, transposed combiners, strict accumulators.
    pub fn standard(universe: UniverseSpec) -> Self {
        let var = LinguisticVariable::standard(universe);
        Self {
            psi: PsiSystem::recent_dominant(var.clone()),
            combiner: PsiSystem::cumulative_dominant(var),
            mode: AccumulatorMode::Strict,
        }
    }

    pub fn psi(&self) -> &PsiSystem {
        &self.psi
    }

    pub fn combiner(&self) -> &PsiSystem {
        &self.combiner
    }

    pub fn variable(&self) -> &LinguisticVariable {
        self.psi.variable()
    }

    pub fn mode(&self) -> AccumulatorMode {
        self.mode
    }

    pub fn empty_state(&self) -> FdesState {
        FdesState::new(self.mode)
    }

    /// Maps a record value to a crisp point: terms go to their centers,
    /// numbers are clamped into the universe.
    pub fn resolve_value(&self, value: RecordValue) -> Result<Clamped> {
        match value {
            RecordValue::Term(l) => Ok(Clamped {
                value: self.variable().center(l),
                was_clamped: false,
            }),
            RecordValue::Crisp(x) => self.variable().universe().clamp(x),
        }
    }

    pub fn apply_record(&self, state: &FdesState, rec: &EvaluationRecord) -> Result<FdesState> {
        let day = check_day(i64::from(rec.day))?;
        if let Some(last_day) = state.last_update_day {
            if day < last_day {
                return Err(Error::OutOfOrder { day, last_day });
            }
        }
        let x = self.resolve_value(rec.value)?.value;
        let mut next = state.clone();
        let slot = rec.indicator.index();
        next.accumulators[slot] = state.accumulators[slot].update(&self.psi, x)?;
        let (chain, final_value) = self.combine(next.indicator_outputs())?;
        next.chain = chain;
        next.final_value = final_value;
        next.last_update_day = Some(day);
        next.record_count += 1;
        Ok(next)
    }

    /// Runs the combiner chain over indicator outputs, skipping empty ones.
    pub fn combine(&self, outputs: [Option<f64>; 5]) -> Result<([Option<f64>; 4], Option<f64>)> {
        let mut running = outputs[0];
        let mut chain = [None; 4];
        for (k, input) in outputs[1..].iter().enumerate() {
            running = match (running, *input) {
                (Some(r), Some(x)) => Some(self.combiner.eval(r, x)?),
                (r, None) => r,
                (None, x) => x,
            };
            chain[k] = running;
        }
        Ok((chain, running))
    }

    pub fn final_out(&self, state: &FdesState) -> Result<FinalOut> {
        let crisp = state.final_value.ok_or(Error::NoData)?;
        Ok(FinalOut {
            crisp,
            term: self.variable().round_to_term(crisp),
        })
    }

    pub fn indicator_status(&self, state: &FdesState, id: IndicatorId) -> Option<f64> {
        state.accumulator(id).current()
    }

    pub fn report(&self, state: &FdesState) -> Report {
        let var = self.variable();
        Report {
            indicators: IndicatorId::ALL
                .iter()
                .map(|&id| {
                    let acc = state.accumulator(id);
                    IndicatorReport {
                        id,
                        description: id.description().to_string(),
                        value: acc.current(),
                        term: acc.current().map(|x| var.round_to_term(x)),
                        records: acc.update_count(),
                    }
                })
                .collect(),
            chain: state.chain,
            final_out: self.final_out(state).ok(),
            record_count: state.record_count,
            last_update_day: state.last_update_day,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub id: IndicatorId,
    pub description: String,
    pub value: Option<f64>,
    pub term: Option<TermLabel>,
    pub records: u32,
}

/// End-of-term (or any-time) record for one course.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub indicators: Vec<IndicatorReport>,
    pub chain: [Option<f64>; 4],
    pub final_out: Option<FinalOut>,
    pub record_count: u32,
    pub last_update_day: Option<u16>,
}
