//! TOML configuration for the linguistic variable, rule tables and engine.
//!
//! ```toml
//! [universe]
//! lo = 10.0
//! hi = 20.0
//! resolution = 1001
//!
//! # Optional; defaults to evenly spaced centers with 0.5 crossovers.
//! [terms]
//! centers = [10.0, 13.333333, 16.666667, 20.0]
//! sigma = 1.415536
//!
//! [rules]
//! # One row per second-input term (NME, AE, G, VG); columns are first-input terms.
//! psi = [
//!   ["NME", "NME", "AE", "G"],
//!   ["AE",  "AE",  "AE", "G"],
//!   ["AE",  "G",   "G",  "G"],
//!   ["G",   "G",   "VG", "VG"],
//! ]
//! combiner = "transpose"      # or a full 4x4 table
//! defuzzifier = "center_average"
//!
//! [accumulator]
//! mode = "strict"             # or "self_paired"
//! ```

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::aggregation::{AccumulatorMode, Defuzzifier, PsiSystem};
use crate::engine::FdesEngine;
use crate::error::{Error, Result};
use crate::fuzzy::{LinguisticVariable, RuleBase4x4, TermLabel, UniverseSpec};

/// Bundled example configuration equal to the built-in defaults.
pub const DEFAULT_FUZZY_TOML: &str = include_str!("../config/fuzzy.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzyConfig {
    pub universe: UniverseConfig,
    #[serde(default)]
    pub terms: Option<TermsConfig>,
    #[serde(default)]
    pub rules: RulesConfig,
    #[serde(default)]
    pub accumulator: AccumulatorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniverseConfig {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    1001
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermsConfig {
    pub centers: [f64; 4],
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulesConfig {
    #[serde(default)]
    pub psi: Option<[[TermLabel; 4]; 4]>,
    #[serde(default)]
    pub combiner: Option<CombinerRules>,
    #[serde(default)]
    pub defuzzifier: Defuzzifier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CombinerRules {
    /// `"transpose"`: the transpose of the indicator table.
    Keyword(String),
    Table([[TermLabel; 4]; 4]),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccumulatorConfig {
    #[serde(default)]
    pub mode: AccumulatorMode,
}

impl FuzzyConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        load_toml(path)
    }

    pub fn variable(&self) -> Result<LinguisticVariable> {
        let u = &self.universe;
        let universe = UniverseSpec::new(u.lo, u.hi, u.resolution)?;
        match &self.terms {
            None => Ok(LinguisticVariable::standard(universe)),
            Some(t) => LinguisticVariable::with_terms(universe, t.centers, t.sigma),
        }
    }

    pub fn build_engine(&self) -> Result<FdesEngine> {
        let var = self.variable()?;
        let psi_rules = match self.rules.psi {
            Some(t) => RuleBase4x4::new(t)?,
            None => RuleBase4x4::recent_dominant(),
        };
        let combiner_rules = match &self.rules.combiner {
            None => psi_rules.transpose(),
            Some(CombinerRules::Keyword(k)) if k == "transpose" => psi_rules.transpose(),
            Some(CombinerRules::Keyword(k)) => {
                return Err(Error::Config(format!(
                    "unknown combiner keyword {k:?} (expected \"transpose\" or a table)"
                )))
            }
            Some(CombinerRules::Table(t)) => RuleBase4x4::new(*t)?,
        };
        let d = self.rules.defuzzifier;
        FdesEngine::new(
            PsiSystem::new(var.clone(), psi_rules, d),
            PsiSystem::new(var, combiner_rules, d),
            self.accumulator.mode,
        )
    }
}

/// Reads and deserializes a TOML file.
pub fn load_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_config_matches_defaults() {
        let cfg = FuzzyConfig::from_toml_str(DEFAULT_FUZZY_TOML).unwrap();
        assert_eq!(cfg.build_engine().unwrap(), FdesEngine::standard(UniverseSpec::grades()));
    }

    #[test]
    fn minimal_config() {
        let cfg = FuzzyConfig::from_toml_str("[universe]\nlo = 0.0\nhi = 1.0\n").unwrap();
        let e = cfg.build_engine().unwrap();
        assert_eq!(e.variable().center(TermLabel::VeryGood), 1.0);
        assert_eq!(e.combiner().rules(), &RuleBase4x4::cumulative_dominant());
        assert_eq!(e.mode(), AccumulatorMode::Strict);
    }

    #[test]
    fn explicit_terms_and_tables() {
        let text = r#"
            [universe]
            lo = 10.0
            hi = 20.0
            resolution = 201
            [terms]
            centers = [10.0, 12.5, 16.0, 20.0]
            sigma = 1.2
            [rules]
            combiner = [
              ["NME", "NME", "AE", "G"],
              ["AE",  "AE",  "AE", "G"],
              ["AE",  "G",   "G",  "G"],
              ["G",   "G",   "VG", "VG"],
            ]
            defuzzifier = "centroid"
            [accumulator]
            mode = "self_paired"
        "#;
        let e = FuzzyConfig::from_toml_str(text).unwrap().build_engine().unwrap();
        assert_eq!(e.variable().center(TermLabel::AsExpected), 12.5);
        assert_eq!(e.combiner().rules(), &RuleBase4x4::recent_dominant());
        assert_eq!(e.psi().defuzzifier(), Defuzzifier::Centroid);
        assert_eq!(e.mode(), AccumulatorMode::SelfPaired);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(FuzzyConfig::from_toml_str("[universe]\nlo = 5.0\nhi = 1.0\n")
            .unwrap()
            .build_engine()
            .is_err());
        assert!(FuzzyConfig::from_toml_str("[universe]\nlo = 0.0\nhi = 1.0\ncolour = 3\n").is_err());
        let bad_keyword = "[universe]\nlo = 0.0\nhi = 1.0\n[rules]\ncombiner = \"flip\"\n";
        assert!(FuzzyConfig::from_toml_str(bad_keyword).unwrap().build_engine().is_err());
        let non_monotone = r#"
            [universe]
            lo = 0.0
            hi = 1.0
            [rules]
            psi = [["VG","NME","AE","G"],["AE","AE","AE","G"],["AE","G","G","G"],["G","G","VG","VG"]]
        "#;
        assert!(matches!(
            FuzzyConfig::from_toml_str(non_monotone).unwrap().build_engine(),
            Err(Error::NonMonotoneRules { .. })
        ));
    }
}
