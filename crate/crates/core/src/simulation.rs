//! Experiments: the four two-input scenarios and the 150-day school year of
//! one typical student, with CSV export for plotting.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aggregation::PsiSystem;
use crate::calendar::{check_day, SCHOOL_DAYS};
use crate::engine::{EvaluationRecord, FdesEngine, IndicatorId, RecordValue};
use crate::error::{Error, Result};
use crate::fuzzy::{LinguisticVariable, TermLabel, UniverseSpec};

/// Bundled trajectories for the five indicators.
pub const DEFAULT_TRAJECTORIES_TOML: &str = include_str!("../config/trajectories.toml");

pub const SIMULATED_STUDENT: &str = "typical-student";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Monotone piecewise-cubic Hermite (no overshoot between anchors).
    #[default]
    Pchip,
    Linear,
}

/// Additive wave that vanishes at every anchor day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Oscillation {
    pub amplitude: f64,
    /// Approximate period in days; each segment gets a whole number of half-waves.
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicatorTrajectory {
    pub start_day: u16,
    /// `(day, value)` control points in increasing day order.
    pub anchors: Vec<(u16, f64)>,
    #[serde(default)]
    pub interpolation: Interpolation,
    #[serde(default)]
    pub oscillation: Option<Oscillation>,
    /// Uniform noise half-width; zero keeps the curve exact.
    #[serde(default)]
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    #[serde(default)]
    pub seed: u64,
    pub indicators: BTreeMap<IndicatorId, IndicatorTrajectory>,
}

impl TrajectoryConfig {
    pub fn default_school_year() -> Self {
        Self::from_toml_str(DEFAULT_TRAJECTORIES_TOML).expect("bundled trajectories are valid")
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = crate::config::load_toml(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (id, t) in &self.indicators {
            let bad = |msg: String| Error::Config(format!("indicator {id}: {msg}"));
            let first = t.anchors.first().ok_or_else(|| bad("no anchors".into()))?;
            check_day(i64::from(t.start_day)).map_err(|e| bad(e.to_string()))?;
            if t.start_day > first.0 {
                return Err(bad(format!(
                    "start day {} is after the first anchor day {}",
                    t.start_day, first.0
                )));
            }
            for (day, value) in &t.anchors {
                check_day(i64::from(*day)).map_err(|e| bad(e.to_string()))?;
                if !value.is_finite() {
                    return Err(bad(format!("anchor value {value} on day {day}")));
                }
            }
            if t.anchors.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(bad("anchor days must be strictly increasing".into()));
            }
            if !(t.noise >= 0.0) {
                return Err(bad(format!("noise must be non-negative, got {}", t.noise)));
            }
            if let Some(o) = t.oscillation {
                if !(o.period > 0.0) || !o.amplitude.is_finite() {
                    return Err(bad("oscillation needs a positive period".into()));
                }
            }
        }
        Ok(())
    }

    /// Checks that every anchor lies inside `universe`.
    pub fn validate_for(&self, universe: &UniverseSpec) -> Result<()> {
        for (id, t) in &self.indicators {
            if let Some((day, v)) = t.anchors.iter().find(|(_, v)| !universe.contains(*v)) {
                return Err(Error::Config(format!(
                    "indicator {id}: anchor {v} on day {day} is outside [{}, {}]",
                    universe.lo(),
                    universe.hi()
                )));
            }
        }
        Ok(())
    }

    /// Trajectory value on `day`, or `None` before the indicator starts.
    pub fn value(&self, id: IndicatorId, day: u16) -> Option<f64> {
        let t = self.indicators.get(&id)?;
        if day < t.start_day {
            return None;
        }
        let x = f64::from(day);
        let mut v = interpolate(&t.anchors, t.interpolation, x);
        if let Some(o) = t.oscillation {
            v += oscillation(&t.anchors, o, x);
        }
        if t.noise > 0.0 {
            let stream = self.seed ^ ((id.index() as u64 + 1) << 32) ^ u64::from(day);
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            v += rng.random_range(-t.noise..=t.noise);
        }
        Some(v)
    }

    pub fn start_day(&self, id: IndicatorId) -> Option<u16> {
        self.indicators.get(&id).map(|t| t.start_day)
    }
}

/// Free-function form of [`TrajectoryConfig::value`].
pub fn indicator_trajectory(cfg: &TrajectoryConfig, id: IndicatorId, day: u16) -> Option<f64> {
    cfg.value(id, day)
}

fn interpolate(anchors: &[(u16, f64)], kind: Interpolation, x: f64) -> f64 {
    let xs: Vec<f64> = anchors.iter().map(|a| f64::from(a.0)).collect();
    let ys: Vec<f64> = anchors.iter().map(|a| a.1).collect();
    let n = xs.len();
    if n == 1 || x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let k = xs.partition_point(|&a| a <= x) - 1;
    let h = xs[k + 1] - xs[k];
    let t = (x - xs[k]) / h;
    match kind {
        Interpolation::Linear => ys[k] + t * (ys[k + 1] - ys[k]),
        Interpolation::Pchip => {
            let d = pchip_slopes(&xs, &ys);
            let (t2, t3) = (t * t, t * t * t);
            let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
            let h10 = t3 - 2.0 * t2 + t;
            let h01 = -2.0 * t3 + 3.0 * t2;
            let h11 = t3 - t2;
            h00 * ys[k] + h10 * h * d[k] + h01 * ys[k + 1] + h11 * h * d[k + 1]
        }
    }
}

/// Fritsch-Carlson slopes with the shape-preserving three-point end rule.
fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: f64, h1: f64, m0: f64, m1: f64| {
        let s = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if s.signum() != m0.signum() || m0 == 0.0 {
            0.0
        } else if m0.signum() != m1.signum() && s.abs() > 3.0 * m0.abs() {
            3.0 * m0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn oscillation(anchors: &[(u16, f64)], o: Oscillation, x: f64) -> f64 {
    let Some(k) = anchors
        .windows(2)
        .position(|w| f64::from(w[0].0) <= x && x <= f64::from(w[1].0))
    else {
        return 0.0;
    };
    let (d0, d1) = (f64::from(anchors[k].0), f64::from(anchors[k + 1].0));
    let half_waves = (2.0 * (d1 - d0) / o.period).round().max(1.0);
    o.amplitude * (std::f64::consts::PI * half_waves * (x - d0) / (d1 - d0)).sin()
}

/// Line style names of the four scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Both inputs near 14.
    Dashed,
    /// Earlier input near VG, newer near G.
    Dotted,
    /// Earlier input near G, newer near VG.
    Dashdot,
    /// Earlier input near VG, newer near AE.
    Solid,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::Dashed,
        ScenarioKind::Dotted,
        ScenarioKind::Dashdot,
        ScenarioKind::Solid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Dashed => "dashed",
            ScenarioKind::Dotted => "dotted",
            ScenarioKind::Dashdot => "dashdot",
            ScenarioKind::Solid => "solid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputGenerator {
    pub mean: f64,
    #[serde(default)]
    pub jitter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub x_m: InputGenerator,
    pub x_m1: InputGenerator,
    #[serde(default = "default_scenario_days")]
    pub days: u16,
    #[serde(default)]
    pub seed: u64,
}

fn default_scenario_days() -> u16 {
    30
}

pub const DEFAULT_JITTER: f64 = 0.4;

impl ScenarioConfig {
    /// The four standard scenarios on `var`, each with its own derived seed.
    pub fn defaults(var: &LinguisticVariable, jitter: f64, seed: u64) -> Vec<ScenarioConfig> {
        use TermLabel::*;
        let u = var.universe();
        // 14 on the grade scale, mapped affinely onto other universes.
        let near_fourteen = u.lo() + 0.4 * u.width();
        let gen = |mean| InputGenerator { mean, jitter };
        let c = |l| var.center(l);
        ScenarioKind::ALL
            .into_iter()
            .enumerate()
            .map(|(i, kind)| {
                let (a, b) = match kind {
                    ScenarioKind::Dashed => (near_fourteen, near_fourteen),
                    ScenarioKind::Dotted => (c(VeryGood), c(Good)),
                    ScenarioKind::Dashdot => (c(Good), c(VeryGood)),
                    ScenarioKind::Solid => (c(VeryGood), c(AsExpected)),
                };
                ScenarioConfig {
                    kind,
                    x_m: gen(a),
                    x_m1: gen(b),
                    days: 30,
                    seed: seed.wrapping_add(i as u64),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub day: u16,
    pub x_m: f64,
    pub x_m1: f64,
    pub x_out: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRun {
    pub kind: ScenarioKind,
    pub rows: Vec<ScenarioRow>,
}

impl ScenarioRun {
    pub fn mean_output(&self) -> f64 {
        self.rows.iter().map(|r| r.x_out).sum::<f64>() / self.rows.len() as f64
    }
}

/// Feeds each scenario's generated inputs through `sys`, one row per day.
pub fn run_psi_scenarios(sys: &PsiSystem, configs: &[ScenarioConfig]) -> Result<Vec<ScenarioRun>> {
    let u = *sys.variable().universe();
    configs
        .iter()
        .map(|cfg| {
            for g in [cfg.x_m, cfg.x_m1] {
                if !u.contains(g.mean) || !(g.jitter >= 0.0) {
                    return Err(Error::Config(format!(
                        "scenario {}: mean {} must lie in the universe and jitter {} must be >= 0",
                        cfg.kind.name(),
                        g.mean,
                        g.jitter
                    )));
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut draw = |g: InputGenerator| -> Result<f64> {
                let noise = if g.jitter > 0.0 {
                    rng.random_range(-g.jitter..=g.jitter)
                } else {
                    0.0
                };
                Ok(u.clamp(g.mean + noise)?.value)
            };
            let rows = (1..=cfg.days)
                .map(|day| {
                    let x_m = draw(cfg.x_m)?;
                    let x_m1 = draw(cfg.x_m1)?;
                    Ok(ScenarioRow {
                        day,
                        x_m,
                        x_m1,
                        x_out: sys.eval(x_m, x_m1)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ScenarioRun {
                kind: cfg.kind,
                rows,
            })
        })
        .collect()
}

/// One simulated day: raw trajectory values, indicator statuses, chain and final.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdesRow {
    pub day: u16,
    pub raw: [Option<f64>; 5],
    pub status: [Option<f64>; 5],
    pub chain: [Option<f64>; 4],
    pub final_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdesRun {
    pub rows: Vec<FdesRow>,
    /// Every record applied, in order, for replay through a store.
    pub records: Vec<EvaluationRecord>,
}

impl FdesRun {
    pub fn row(&self, day: u16) -> Option<&FdesRow> {
        self.rows.iter().find(|r| r.day == day)
    }
}

/// Samples each active indicator every `sampling_interval_days` days (from
/// its start day) and drives the engine through the whole school year.
///
/// Emitted values are quantized to six decimals so the records replay
/// bit-exactly from the evaluation log.
pub fn run_fdes_simulation(
    engine: &FdesEngine,
    cfg: &TrajectoryConfig,
    sampling_interval_days: u16,
) -> Result<FdesRun> {
    if sampling_interval_days == 0 {
        return Err(Error::InvalidArgument("sampling interval must be at least one day".into()));
    }
    let universe = *engine.variable().universe();
    cfg.validate_for(&universe)?;
    let mut state = engine.empty_state();
    let mut rows = Vec::with_capacity(usize::from(SCHOOL_DAYS));
    let mut records = Vec::new();
    for day in 1..=SCHOOL_DAYS {
        let mut raw = [None; 5];
        for id in IndicatorId::ALL {
            let (Some(v), Some(start)) = (cfg.value(id, day), cfg.start_day(id)) else {
                continue;
            };
            let v = quantize(universe.clamp(v)?.value);
            raw[id.index()] = Some(v);
            if (day - start) % sampling_interval_days != 0 {
                continue;
            }
            let rec = EvaluationRecord {
                student_id: SIMULATED_STUDENT.to_string(),
                indicator: id,
                day,
                value: RecordValue::Crisp(v),
                note: "simulated".to_string(),
            };
            state = engine.apply_record(&state, &rec)?;
            records.push(rec);
        }
        rows.push(FdesRow {
            day,
            raw,
            status: state.indicator_outputs(),
            chain: state.chain(),
            final_value: state.final_value(),
        });
    }
    Ok(FdesRun { rows, records })
}

fn quantize(x: f64) -> f64 {
    format!("{x:.6}").parse().expect("formatted float parses")
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

pub const SCENARIO_CSV_HEADER: [&str; 4] = ["day", "x_m", "x_m1", "x_out"];

pub fn fdes_csv_header() -> Vec<String> {
    let mut h = vec!["day".to_string()];
    h.extend(IndicatorId::ALL.iter().map(|id| format!("{id}_raw")));
    h.extend(IndicatorId::ALL.iter().map(|id| format!("{id}_status")));
    h.extend((1..=4).map(|k| format!("y{k}")));
    h.push("final".to_string());
    h
}

fn csv_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

pub fn write_scenario_csv(run: &ScenarioRun, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(SCENARIO_CSV_HEADER).map_err(|e| csv_err(path, e))?;
    for r in &run.rows {
        w.write_record([
            r.day.to_string(),
            format!("{:.6}", r.x_m),
            format!("{:.6}", r.x_m1),
            format!("{:.6}", r.x_out),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| csv_err(path, e))
}

pub fn write_fdes_csv(run: &FdesRun, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(fdes_csv_header()).map_err(|e| csv_err(path, e))?;
    for r in &run.rows {
        let mut fields = vec![r.day.to_string()];
        fields.extend(r.raw.iter().map(|v| cell(*v)));
        fields.extend(r.status.iter().map(|v| cell(*v)));
        fields.extend(r.chain.iter().map(|v| cell(*v)));
        fields.push(cell(r.final_value));
        w.write_record(&fields).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| csv_err(path, e))
}
