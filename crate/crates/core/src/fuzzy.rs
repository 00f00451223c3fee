//! Linguistic variables over a crisp grade universe, Gaussian membership,
//! 4x4 rule bases, Mamdani-product inference and defuzzification.
//!
//! Inputs are singleton-fuzzified: a crisp score `x` is clamped into the
//! universe and evaluated against each of the four terms. A rule `(i, j)`
//! (first input in term `i`, second input in term `j`) fires with the product
//! of the two memberships, and rules sharing a consequent are combined by max.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest sample count accepted for discretized operations.
pub const MIN_RESOLUTION: usize = 101;

/// The crisp range a linguistic variable lives on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniverseSpec {
    lo: f64,
    hi: f64,
    resolution: usize,
}

/// A crisp value after clamping into a universe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub value: f64,
    /// True when the input lay outside `[lo, hi]`.
    pub was_clamped: bool,
}

impl UniverseSpec {
    pub fn new(lo: f64, hi: f64, resolution: usize) -> Result<Self> {
        let invalid = |reason| Error::InvalidUniverse {
            lo,
            hi,
            resolution,
            reason,
        };
        if !lo.is_finite() || !hi.is_finite() {
            return Err(invalid("bounds must be finite"));
        }
        if lo >= hi {
            return Err(invalid("lo must be strictly below hi"));
        }
        if resolution < MIN_RESOLUTION {
            return Err(invalid("resolution must be at least 101"));
        }
        Ok(Self { lo, hi, resolution })
    }

    /// The grade range `[10, 20]` with 1001 samples.
    pub fn grades() -> Self {
        Self {
            lo: 10.0,
            hi: 20.0,
            resolution: 1001,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }

    /// Clamps `x` into `[lo, hi]`. NaN and infinities are rejected.
    pub fn clamp(&self, x: f64) -> Result<Clamped> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        let value = x.clamp(self.lo, self.hi);
        Ok(Clamped {
            value,
            was_clamped: value != x,
        })
    }

    /// `n` evenly spaced points from `lo` to `hi` inclusive.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2, "a grid needs at least two points");
        let step = self.width() / (n - 1) as f64;
        (0..n)
            .map(|k| if k == n - 1 { self.hi } else { self.lo + k as f64 * step })
            .collect()
    }
}

/// The four descriptive phrases, ordered `NME < AE < G < VG`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TermLabel {
    #[serde(rename = "NME")]
    NeedMoreEffort,
    #[serde(rename = "AE")]
    AsExpected,
    #[serde(rename = "G")]
    Good,
    #[serde(rename = "VG")]
    VeryGood,
}

impl TermLabel {
    pub const ALL: [TermLabel; 4] = [
        TermLabel::NeedMoreEffort,
        TermLabel::AsExpected,
        TermLabel::Good,
        TermLabel::VeryGood,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn code(self) -> &'static str {
        match self {
            TermLabel::NeedMoreEffort => "NME",
            TermLabel::AsExpected => "AE",
            TermLabel::Good => "G",
            TermLabel::VeryGood => "VG",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            TermLabel::NeedMoreEffort => "Need More Effort",
            TermLabel::AsExpected => "As Expected",
            TermLabel::Good => "Good",
            TermLabel::VeryGood => "Very Good",
        }
    }
}

impl fmt::Display for TermLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for TermLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NME" => Ok(TermLabel::NeedMoreEffort),
            "AE" => Ok(TermLabel::AsExpected),
            "G" => Ok(TermLabel::Good),
            "VG" => Ok(TermLabel::VeryGood),
            _ => Err(Error::InvalidArgument(format!(
                "unknown term label {s:?} (expected NME, AE, G or VG)"
            ))),
        }
    }
}

/// A symmetric Gaussian fuzzy set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinguisticTerm {
    pub label: TermLabel,
    pub center: f64,
    pub sigma: f64,
}

impl LinguisticTerm {
    /// `exp(-(x - center)^2 / (2 sigma^2))` without input validation.
    #[inline]
    pub fn degree(&self, x: f64) -> f64 {
        let d = x - self.center;
        (-(d * d) / (2.0 * self.sigma * self.sigma)).exp()
    }
}

/// Degree to which `x` belongs to `term`.
pub fn membership(x: f64, term: &LinguisticTerm) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    if !(term.sigma > 0.0) {
        return Err(Error::InvalidVariable(format!(
            "term {} has non-positive sigma {}",
            term.label, term.sigma
        )));
    }
    Ok(term.degree(x))
}

/// A universe partitioned into the four ordered terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticVariable {
    universe: UniverseSpec,
    terms: [LinguisticTerm; 4],
}

impl LinguisticVariable {
    /// Evenly spaced centers `lo + i (hi - lo) / 3` with a shared sigma chosen
    /// so that adjacent terms cross at membership exactly 0.5.
    pub fn standard(universe: UniverseSpec) -> Self {
        let spacing = universe.width() / 3.0;
        let sigma = spacing / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
        let centers = [
            universe.lo,
            universe.lo + spacing,
            universe.lo + 2.0 * spacing,
            universe.hi,
        ];
        Self {
            universe,
            terms: std::array::from_fn(|i| LinguisticTerm {
                label: TermLabel::ALL[i],
                center: centers[i],
                sigma,
            }),
        }
    }

    /// A variable with explicit centers and a shared sigma.
    pub fn with_terms(universe: UniverseSpec, centers: [f64; 4], sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidVariable(format!("sigma must be positive, got {sigma}")));
        }
        for (i, c) in centers.iter().enumerate() {
            if !universe.contains(*c) {
                return Err(Error::InvalidVariable(format!(
                    "center {c} of {} lies outside [{}, {}]",
                    TermLabel::ALL[i],
                    universe.lo,
                    universe.hi
                )));
            }
        }
        if centers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidVariable(
                "term centers must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            universe,
            terms: std::array::from_fn(|i| LinguisticTerm {
                label: TermLabel::ALL[i],
                center: centers[i],
                sigma,
            }),
        })
    }

    pub fn universe(&self) -> &UniverseSpec {
        &self.universe
    }

    pub fn terms(&self) -> &[LinguisticTerm; 4] {
        &self.terms
    }

    pub fn term(&self, label: TermLabel) -> &LinguisticTerm {
        &self.terms[label.index()]
    }

    pub fn center(&self, label: TermLabel) -> f64 {
        self.terms[label.index()].center
    }

    pub fn centers(&self) -> [f64; 4] {
        self.terms.map(|t| t.center)
    }

    /// Midpoints between adjacent centers (the rounding boundaries).
    pub fn midpoints(&self) -> [f64; 3] {
        std::array::from_fn(|i| 0.5 * (self.terms[i].center + self.terms[i + 1].center))
    }

    /// Nearest term by center distance; an exact midpoint goes to the upper term.
    pub fn round_to_term(&self, x: f64) -> TermLabel {
        let tie_eps = 1e-9 * self.universe.width();
        let mut best = 0;
        for i in 1..4 {
            let d_best = (x - self.terms[best].center).abs();
            let d_i = (x - self.terms[i].center).abs();
            if d_i < d_best || (d_i - d_best).abs() <= tie_eps {
                best = i;
            }
        }
        self.terms[best].label
    }
}

/// Memberships of `x` (clamped into the universe) in NME, AE, G, VG.
pub fn fuzzify(x: f64, var: &LinguisticVariable) -> Result<[f64; 4]> {
    let x = var.universe.clamp(x)?.value;
    Ok(var.terms.map(|t| t.degree(x)))
}

/// A 4x4 consequent table. `table[row][col]` holds the consequent for a
/// second input (stage m+1) in term `row` and a first input (stage m) in
/// term `col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleBase4x4 {
    table: [[TermLabel; 4]; 4],
}

impl RuleBase4x4 {
    /// Builds a rule base, rejecting tables whose rows or columns decrease.
    pub fn new(table: [[TermLabel; 4]; 4]) -> Result<Self> {
        for row in 0..4 {
            for col in 0..4 {
                if col > 0 && table[row][col] < table[row][col - 1] {
                    return Err(Error::NonMonotoneRules { row, col });
                }
                if row > 0 && table[row][col] < table[row - 1][col] {
                    return Err(Error::NonMonotoneRules { row, col });
                }
            }
        }
        Ok(Self { table })
    }

    /// The recent-dominant table used by every indicator's two-input system.
    pub fn recent_dominant() -> Self {
        use TermLabel::{AsExpected as AE, Good as G, NeedMoreEffort as NME, VeryGood as VG};
        Self {
            table: [
                [NME, NME, AE, G],
                [AE, AE, AE, G],
                [AE, G, G, G],
                [G, G, VG, VG],
            ],
        }
    }

    /// The transpose of [`RuleBase4x4::recent_dominant`]: the first
    /// (accumulated) input carries the weight.
    pub fn cumulative_dominant() -> Self {
        Self::recent_dominant().transpose()
    }

    pub fn transpose(&self) -> Self {
        Self {
            table: std::array::from_fn(|r| std::array::from_fn(|c| self.table[c][r])),
        }
    }

    pub fn table(&self) -> &[[TermLabel; 4]; 4] {
        &self.table
    }

    /// Consequent of the rule "first is `first` AND second is `second`".
    pub fn consequent(&self, first: TermLabel, second: TermLabel) -> TermLabel {
        self.table[second.index()][first.index()]
    }
}

/// Per-consequent firing strengths after rule combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzyOutput {
    weights: [f64; 4],
}

impl FuzzyOutput {
    pub fn new(weights: [f64; 4]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::InvalidArgument(format!(
                "consequent weight {w} lies outside [0, 1]"
            )));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64; 4] {
        &self.weights
    }

    pub fn weight(&self, label: TermLabel) -> f64 {
        self.weights[label.index()]
    }

    /// The consequent with the largest weight (lowest label on exact ties).
    pub fn dominant(&self) -> TermLabel {
        let mut best = 0;
        for i in 1..4 {
            if self.weights[i] > self.weights[best] {
                best = i;
            }
        }
        TermLabel::ALL[best]
    }
}

/// Fires all 16 rules with the product t-norm and combines rules that share a
/// consequent by max.
pub fn infer_mamdani_product(
    rules: &RuleBase4x4,
    x_m: f64,
    x_m1: f64,
    var: &LinguisticVariable,
) -> Result<FuzzyOutput> {
    let first = fuzzify(x_m, var)?;
    let second = fuzzify(x_m1, var)?;
    let mut weights = [0.0f64; 4];
    for (row, mu_second) in second.iter().enumerate() {
        for (col, mu_first) in first.iter().enumerate() {
            let out = rules.table[row][col].index();
            weights[out] = weights[out].max(mu_first * mu_second);
        }
    }
    Ok(FuzzyOutput { weights })
}

/// Weighted mean of `centers` by `weights`. Weights need not be normalized.
pub fn center_average(weights: &[f64; 4], centers: &[f64; 4]) -> Result<f64> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidArgument(
            "weights must be finite and non-negative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroWeights);
    }
    let num: f64 = weights.iter().zip(centers).map(|(w, c)| w * c).sum();
    Ok(num / total)
}

/// Center-average defuzzifier: `sum_L w_L c_L / sum_L w_L`.
pub fn defuzzify_center_average(out: &FuzzyOutput, var: &LinguisticVariable) -> Result<f64> {
    center_average(&out.weights, &var.centers())
}

/// Discretized centroid of `max_L w_L * mu_L(y)` over `resolution` samples.
pub fn defuzzify_centroid(out: &FuzzyOutput, var: &LinguisticVariable) -> Result<f64> {
    if out.weights.iter().all(|w| *w <= 0.0) {
        return Err(Error::ZeroWeights);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for y in var.universe.grid(var.universe.resolution) {
        let mu = var
            .terms
            .iter()
            .zip(out.weights)
            .map(|(t, w)| w * t.degree(y))
            .fold(0.0, f64::max);
        num += mu * y;
        den += mu;
    }
    if den <= 0.0 {
        return Err(Error::ZeroWeights);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grades() -> LinguisticVariable {
        LinguisticVariable::standard(UniverseSpec::grades())
    }

    #[test]
    fn gaussian_values() {
        let var = grades();
        let g = var.term(TermLabel::Good);
        assert!((membership(16.666666666666668, g).unwrap() - 1.0).abs() < 1e-12);
        assert!((membership(15.0, g).unwrap() - 0.5).abs() < 1e-9);
        let two_sigma = g.center + 2.0 * g.sigma;
        assert!((membership(two_sigma, g).unwrap() - (-2.0f64).exp()).abs() < 1e-12);
        assert!((membership(two_sigma, g).unwrap() - 0.13534).abs() < 1e-5);
    }

    #[test]
    fn membership_rejects_non_finite() {
        let var = grades();
        let t = var.term(TermLabel::AsExpected);
        assert!(membership(f64::NAN, t).unwrap_err().to_string().contains("finite"));
        assert!(membership(f64::INFINITY, t).is_err());
        assert!(fuzzify(f64::NEG_INFINITY, &var).is_err());
    }

    #[test]
    fn universe_validation() {
        assert!(UniverseSpec::new(20.0, 10.0, 1001).is_err());
        assert!(UniverseSpec::new(10.0, 10.0, 1001).is_err());
        assert!(UniverseSpec::new(10.0, 20.0, 100).is_err());
        assert!(UniverseSpec::new(0.0, 1.0, 101).is_ok());
    }

    #[test]
    fn standard_variable_on_grades() {
        let var = grades();
        let c = var.centers();
        let expected = [10.0, 13.333333333333334, 16.666666666666668, 20.0];
        for (a, b) in c.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        // Oracle: solve exp(-(dc/2)^2 / (2 s^2)) = 0.5 for s by bisection.
        let half = (10.0 / 3.0) / 2.0;
        let (mut lo, mut hi) = (0.1f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (-(half * half) / (2.0 * mid * mid)).exp() < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let sigma = var.term(TermLabel::Good).sigma;
        assert!((sigma - lo).abs() < 1e-9);
        assert!((sigma - 1.41553).abs() < 1e-5);
    }

    #[test]
    fn standard_variable_on_unit_interval() {
        let var = LinguisticVariable::standard(UniverseSpec::new(0.0, 1.0, 101).unwrap());
        let c = var.centers();
        for (a, b) in c.iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn explicit_terms_are_validated() {
        let u = UniverseSpec::grades();
        assert!(LinguisticVariable::with_terms(u, [10.0, 12.0, 15.0, 20.0], 1.2).is_ok());
        assert!(LinguisticVariable::with_terms(u, [10.0, 15.0, 12.0, 20.0], 1.2).is_err());
        assert!(LinguisticVariable::with_terms(u, [9.0, 12.0, 15.0, 20.0], 1.2).is_err());
        assert!(LinguisticVariable::with_terms(u, [10.0, 12.0, 15.0, 20.0], 0.0).is_err());
    }

    #[test]
    fn crossovers_are_half() {
        let var = grades();
        for (i, m) in var.midpoints().iter().enumerate() {
            let mu = fuzzify(*m, &var).unwrap();
            assert!((mu[i] - 0.5).abs() < 1e-9, "{mu:?}");
            assert!((mu[i + 1] - 0.5).abs() < 1e-9, "{mu:?}");
        }
    }

    #[test]
    fn fuzzify_examples() {
        let var = grades();
        let mu = fuzzify(10.0, &var).unwrap();
        // Direct evaluation: adjacent centers k spacings away give 0.5^(4 k^2).
        assert!((mu[0] - 1.0).abs() < 1e-12);
        assert!((mu[1] - 0.0625).abs() < 1e-12);
        assert!((mu[2] - 0.5f64.powi(16)).abs() < 1e-15);
        assert!((mu[2] - 1.5e-5).abs() < 1e-6);
        assert!(mu[3] < 1e-10);
        assert_eq!(mu.iter().cloned().fold(f64::MIN, f64::max), mu[0]);

        assert!((fuzzify(20.0, &var).unwrap()[3] - 1.0).abs() < 1e-12);

        let mu = fuzzify(11.666666666666666, &var).unwrap();
        assert!((mu[0] - 0.5).abs() < 1e-9 && (mu[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn fuzzify_clamps_out_of_range() {
        let var = grades();
        assert_eq!(fuzzify(25.0, &var).unwrap(), fuzzify(20.0, &var).unwrap());
        assert_eq!(fuzzify(-3.0, &var).unwrap(), fuzzify(10.0, &var).unwrap());
        let c = var.universe().clamp(25.0).unwrap();
        assert_eq!(c.value, 20.0);
        assert!(c.was_clamped);
        assert!(!var.universe().clamp(12.0).unwrap().was_clamped);
    }

    #[test]
    fn fuzzify_peaks_at_centers() {
        let var = grades();
        for (i, c) in var.centers().iter().enumerate() {
            let mu = fuzzify(*c, &var).unwrap();
            assert!((mu[i] - 1.0).abs() < 1e-12);
            assert!(mu.iter().enumerate().all(|(j, v)| j == i || *v < 1.0));
        }
    }

    #[test]
    fn rule_table_layout() {
        use TermLabel::*;
        let rb = RuleBase4x4::recent_dominant();
        // Columns are the first input, rows the second.
        assert_eq!(rb.consequent(AsExpected, NeedMoreEffort), NeedMoreEffort);
        assert_eq!(rb.consequent(NeedMoreEffort, AsExpected), AsExpected);
        assert_eq!(rb.consequent(VeryGood, NeedMoreEffort), Good);
        assert_eq!(rb.consequent(NeedMoreEffort, VeryGood), Good);
        assert_eq!(rb.consequent(Good, VeryGood), VeryGood);
        assert_eq!(rb.consequent(VeryGood, Good), Good);
        let tr = RuleBase4x4::cumulative_dominant();
        for a in TermLabel::ALL {
            for b in TermLabel::ALL {
                assert_eq!(tr.consequent(a, b), rb.consequent(b, a));
            }
        }
        assert_eq!(tr.transpose(), rb);
    }

    #[test]
    fn rule_base_rejects_decreasing_rows() {
        use TermLabel::*;
        let mut t = *RuleBase4x4::recent_dominant().table();
        assert!(RuleBase4x4::new(t).is_ok());
        t[0][3] = NeedMoreEffort;
        assert_eq!(
            RuleBase4x4::new(t).unwrap_err(),
            Error::NonMonotoneRules { row: 0, col: 3 }
        );
        let mut t = *RuleBase4x4::recent_dominant().table();
        t[3][0] = NeedMoreEffort;
        assert!(matches!(RuleBase4x4::new(t), Err(Error::NonMonotoneRules { .. })));
    }

    #[test]
    fn inference_examples() {
        use TermLabel::*;
        let var = grades();
        let rb = RuleBase4x4::recent_dominant();
        let c = |l| var.center(l);

        let out = infer_mamdani_product(&rb, c(AsExpected), c(NeedMoreEffort), &var).unwrap();
        assert_eq!(out.dominant(), NeedMoreEffort);
        assert!((out.weight(NeedMoreEffort) - 1.0).abs() < 1e-12);

        let out = infer_mamdani_product(&rb, c(Good), c(Good), &var).unwrap();
        assert!((out.weight(Good) - 1.0).abs() < 1e-12);
        for l in [NeedMoreEffort, AsExpected, VeryGood] {
            assert!(out.weight(l) < 0.07, "{l}: {}", out.weight(l));
        }

        let out = infer_mamdani_product(&rb, c(VeryGood), c(VeryGood), &var).unwrap();
        assert!((out.weight(VeryGood) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inference_matches_direct_rule_enumeration() {
        let var = grades();
        let rb = RuleBase4x4::recent_dominant();
        for &(a, b) in &[(11.2, 17.9), (14.0, 14.0), (19.5, 10.3), (15.0, 18.2)] {
            let out = infer_mamdani_product(&rb, a, b, &var).unwrap();
            let mut expect = [0.0f64; 4];
            for i in TermLabel::ALL {
                for j in TermLabel::ALL {
                    let w = var.term(i).degree(a) * var.term(j).degree(b);
                    let k = rb.consequent(i, j).index();
                    expect[k] = expect[k].max(w);
                }
            }
            assert_eq!(out.weights(), &expect);
        }
    }

    #[test]
    fn center_average_examples() {
        use TermLabel::*;
        let var = grades();
        let g = FuzzyOutput::new([0.0, 0.0, 1.0, 0.0]).unwrap();
        assert!((defuzzify_center_average(&g, &var).unwrap() - 16.666666666666668).abs() < 1e-9);
        let ne = FuzzyOutput::new([0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!((defuzzify_center_average(&ne, &var).unwrap() - 11.666666666666666).abs() < 1e-9);

        // Unnormalized weights; independent recomputation of the weighted mean.
        let w = [1.0625, 0.1328, 1.5e-5, 0.0];
        let c = var.centers();
        let expect = (w[0] * c[0] + w[1] * c[1] + w[2] * c[2]) / (w[0] + w[1] + w[2]);
        let got = center_average(&w, &c).unwrap();
        assert_eq!(got, expect);
        assert!((got - 10.37).abs() < 0.005);
        assert_eq!(var.center(NeedMoreEffort), 10.0);
    }

    #[test]
    fn defuzzifiers_reject_zero_weights() {
        let var = grades();
        let z = FuzzyOutput::new([0.0; 4]).unwrap();
        assert_eq!(defuzzify_center_average(&z, &var), Err(Error::ZeroWeights));
        assert_eq!(defuzzify_centroid(&z, &var), Err(Error::ZeroWeights));
        assert!(FuzzyOutput::new([1.2, 0.0, 0.0, 0.0]).is_err());
    }

    /// Trapezoid-rule centroid at very high resolution, independent of the
    /// sample-sum implementation.
    fn centroid_oracle(weights: [f64; 4], var: &LinguisticVariable) -> f64 {
        let n = 200_001;
        let (lo, hi) = (var.universe().lo(), var.universe().hi());
        let h = (hi - lo) / (n - 1) as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..n {
            let y = lo + k as f64 * h;
            let mu = (0..4)
                .map(|i| weights[i] * var.terms()[i].degree(y))
                .fold(0.0, f64::max);
            let wt = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            num += wt * mu * y;
            den += wt * mu;
        }
        num / den
    }

    #[test]
    fn centroid_examples() {
        let var = grades();
        let g = FuzzyOutput::new([0.0, 0.0, 1.0, 0.0]).unwrap();
        let got = defuzzify_centroid(&g, &var).unwrap();
        assert!((got - 16.666666666666668).abs() < 0.15, "{got}");
        assert!((got - centroid_oracle([0.0, 0.0, 1.0, 0.0], &var)).abs() < 1e-3);

        let ae = FuzzyOutput::new([0.0, 1.0, 0.0, 0.0]).unwrap();
        let got = defuzzify_centroid(&ae, &var).unwrap();
        assert!((got - 13.333333333333334).abs() < 0.05, "{got}");

        for w in [0.2, 0.7, 1.0] {
            let sym = FuzzyOutput::new([0.0, w, w, 0.0]).unwrap();
            let got = defuzzify_centroid(&sym, &var).unwrap();
            assert!((got - 15.0).abs() < 0.05, "{got}");
        }
    }

    #[test]
    fn centroid_at_minimum_resolution() {
        let var = LinguisticVariable::standard(UniverseSpec::new(10.0, 20.0, 101).unwrap());
        let ae = FuzzyOutput::new([0.0, 1.0, 0.0, 0.0]).unwrap();
        let got = defuzzify_centroid(&ae, &var).unwrap();
        assert!((got - 13.333333333333334).abs() < 0.05, "{got}");
    }

    #[test]
    fn rounding_partition() {
        use TermLabel::*;
        let var = grades();
        for l in TermLabel::ALL {
            assert_eq!(var.round_to_term(var.center(l)), l);
        }
        assert_eq!(var.round_to_term(14.9), AsExpected);
        assert_eq!(var.round_to_term(15.0), Good);
        assert_eq!(var.round_to_term(11.666666666666666), AsExpected);
        assert_eq!(var.round_to_term(18.333333333333332), VeryGood);
        assert_eq!(var.round_to_term(11.6666), NeedMoreEffort);
        assert_eq!(var.round_to_term(18.3333), Good);
        assert_eq!(var.round_to_term(20.0), VeryGood);
    }

    #[test]
    fn term_labels_parse_and_order() {
        assert!(TermLabel::NeedMoreEffort < TermLabel::AsExpected);
        assert!(TermLabel::Good < TermLabel::VeryGood);
        for l in TermLabel::ALL {
            assert_eq!(l.code().parse::<TermLabel>().unwrap(), l);
            assert_eq!(TermLabel::from_index(l.index()), Some(l));
        }
        assert_eq!("vg".parse::<TermLabel>().unwrap(), TermLabel::VeryGood);
        assert!("B".parse::<TermLabel>().is_err());
    }
}
