//! The two-input system and the structures built from it: the open-loop
//! chain over an indicator's propositions, the feedback accumulator that
//! realizes the same chain incrementally, and rule-count accounting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{
    defuzzify_center_average, defuzzify_centroid, infer_mamdani_product, LinguisticVariable,
    RuleBase4x4,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Defuzzifier {
    #[default]
    CenterAverage,
    Centroid,
}

/// Two-input, single-output Mamdani-product system.
///
/// The first input is the earlier (or accumulated) value, the second the
/// newer one. Which of the two dominates is decided entirely by the rule base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiSystem {
    var: LinguisticVariable,
    rules: RuleBase4x4,
    defuzzifier: Defuzzifier,
}

impl PsiSystem {
    pub fn new(var: LinguisticVariable, rules: RuleBase4x4, defuzzifier: Defuzzifier) -> Self {
        Self {
            var,
            rules,
            defuzzifier,
        }
    }

    /// Recent-dominant rule base with center-average defuzzification.
    pub fn recent_dominant(var: LinguisticVariable) -> Self {
        Self::new(var, RuleBase4x4::recent_dominant(), Defuzzifier::CenterAverage)
    }

    /// Cumulative-dominant (transposed) rule base with center-average defuzzification.
    pub fn cumulative_dominant(var: LinguisticVariable) -> Self {
        Self::new(var, RuleBase4x4::cumulative_dominant(), Defuzzifier::CenterAverage)
    }

    pub fn variable(&self) -> &LinguisticVariable {
        &self.var
    }

    pub fn rules(&self) -> &RuleBase4x4 {
        &self.rules
    }

    pub fn defuzzifier(&self) -> Defuzzifier {
        self.defuzzifier
    }

    pub fn eval(&self, x_m: f64, x_m1: f64) -> Result<f64> {
        let out = infer_mamdani_product(&self.rules, x_m, x_m1, &self.var)?;
        match self.defuzzifier {
            Defuzzifier::CenterAverage => defuzzify_center_average(&out, &self.var),
            Defuzzifier::Centroid => defuzzify_centroid(&out, &self.var),
        }
    }
}

/// Left fold of `sys` over time-ordered propositions: `n` inputs take
/// exactly `n - 1` evaluations, the running value always entering first.
pub fn fold_open_loop(sys: &PsiSystem, inputs: &[f64]) -> Result<f64> {
    let (first, rest) = inputs
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("cannot fold an empty input list".into()))?;
    let start = sys.var.universe().clamp(*first)?.value;
    rest.iter().try_fold(start, |acc, x| sys.eval(acc, *x))
}

/// How the first proposition initializes an accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccumulatorMode {
    /// The first proposition is stored as is, so the accumulator reproduces
    /// [`fold_open_loop`] exactly.
    #[default]
    Strict,
    /// The first proposition is fed to both inputs, `psi(x, x)`.
    SelfPaired,
}

/// Feedback form of the fold: the previous output returns as the first input.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IndicatorAccumulator {
    current: Option<f64>,
    update_count: u32,
    mode: AccumulatorMode,
}

impl IndicatorAccumulator {
    pub fn new(mode: AccumulatorMode) -> Self {
        Self {
            current: None,
            update_count: 0,
            mode,
        }
    }

    pub fn current(&self) -> Option<f64> {
        self.current
    }

    pub fn update_count(&self) -> u32 {
        self.update_count
    }

    pub fn mode(&self) -> AccumulatorMode {
        self.mode
    }

    pub fn update(&self, sys: &PsiSystem, x_new: f64) -> Result<Self> {
        let current = match (self.current, self.mode) {
            (Some(prev), _) => sys.eval(prev, x_new)?,
            (None, AccumulatorMode::Strict) => sys.var.universe().clamp(x_new)?.value,
            (None, AccumulatorMode::SelfPaired) => sys.eval(x_new, x_new)?,
        };
        Ok(Self {
            current: Some(current),
            update_count: self.update_count + 1,
            mode: self.mode,
        })
    }
}

/// Rule counts of a flat system versus a chain of two-input systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCountReport {
    pub inputs: u32,
    pub terms_per_input: u32,
    pub flat_count: u64,
    pub hierarchical_levels: u32,
    pub hierarchical_count: u64,
}

/// `m` inputs with `n` terms each need `n^m` rules flat, but only
/// `(m - 1) n^2` when chained through `m - 1` two-input levels.
pub fn rule_count(m: u32, n: u32) -> Result<RuleCountReport> {
    if m < 2 || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "rule counting needs m >= 2 and n >= 2, got m = {m}, n = {n}"
        )));
    }
    let flat_count = u64::from(n)
        .checked_pow(m)
        .ok_or_else(|| Error::InvalidArgument(format!("{n}^{m} overflows u64")))?;
    let levels = m - 1;
    Ok(RuleCountReport {
        inputs: m,
        terms_per_input: n,
        flat_count,
        hierarchical_levels: levels,
        hierarchical_count: u64::from(levels) * u64::from(n) * u64::from(n),
    })
}
