//! Property checks with measured bounds, shared by the `check` command and
//! the acceptance suite.
//!
//! Tolerances are stated in grade units: one tenth of the universe width,
//! i.e. exactly 1.0 on the default `[10, 20]` scale.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aggregation::{fold_open_loop, rule_count, AccumulatorMode, IndicatorAccumulator, PsiSystem};
use crate::engine::FdesEngine;
use crate::error::Result;
use crate::fuzzy::{infer_mamdani_product, LinguisticVariable, TermLabel};
use crate::simulation::{FdesRun, ScenarioKind, ScenarioRun};

pub const TABLE_FIDELITY_TOL: f64 = 1.0;
pub const DIAGONAL_GRID_TOL: f64 = 0.5;
pub const DIAGONAL_CENTER_TOL: f64 = 0.35;
pub const MIDPOINT_EXACT_TOL: f64 = 1e-9;
pub const MONOTONE_SLACK: f64 = 0.1;
pub const DOMINANCE_MARGIN: f64 = 1.0;
pub const SELF_PAIRED_TOL: f64 = 0.5;
pub const ALPHA3_TOL: f64 = 1.5;
pub const DAILY_JUMP_BOUND: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn unit(var: &LinguisticVariable) -> f64 {
    var.universe().width() / 10.0
}

/// Dominant consequent at every pair of term centers equals the table cell,
/// and the crisp output lies within one grade unit of that cell's center.
pub fn table_fidelity(psi: &PsiSystem) -> Result<Verdict> {
    let var = psi.variable();
    let mut mismatches = Vec::new();
    let mut worst = 0.0f64;
    for first in TermLabel::ALL {
        for second in TermLabel::ALL {
            let (a, b) = (var.center(first), var.center(second));
            let cell = psi.rules().consequent(first, second);
            let out = infer_mamdani_product(psi.rules(), a, b, var)?;
            if out.dominant() != cell {
                mismatches.push(format!("({first},{second})"));
            }
            worst = worst.max((psi.eval(a, b)? - var.center(cell)).abs());
        }
    }
    let tol = TABLE_FIDELITY_TOL * unit(var);
    Ok(Verdict::new(
        "table-fidelity",
        mismatches.is_empty() && worst <= tol,
        format!(
            "16/16 pairs checked, {} dominant-consequent mismatches, max |out - cell center| = {worst:.4} (tol {tol})",
            mismatches.len()
        ),
    ))
}

/// `max |psi(x, x) - x|` over a 101-point grid, plus the term-center bound.
pub fn diagonal_near_identity(psi: &PsiSystem) -> Result<Verdict> {
    let var = psi.variable();
    let mut grid_worst = 0.0f64;
    for x in var.universe().grid(101) {
        grid_worst = grid_worst.max((psi.eval(x, x)? - x).abs());
    }
    let mut center_worst = 0.0f64;
    for c in var.centers() {
        center_worst = center_worst.max((psi.eval(c, c)? - c).abs());
    }
    let mids = var
        .midpoints()
        .iter()
        .map(|m| Ok(format!("{:.3e}", (psi.eval(*m, *m)? - m).abs())))
        .collect::<Result<Vec<_>>>()?;
    let (gt, ct) = (DIAGONAL_GRID_TOL * unit(var), DIAGONAL_CENTER_TOL * unit(var));
    Ok(Verdict::new(
        "diagonal-near-identity",
        grid_worst <= gt && center_worst <= ct,
        format!(
            "grid max {grid_worst:.4} (tol {gt}), centers max {center_worst:.4} (tol {ct}), crossover midpoints [{}]",
            mids.join(", ")
        ),
    ))
}

/// `|psi(m, m) - m| <= 1e-9` at each of the three crossover midpoints.
pub fn diagonal_midpoint_exactness(psi: &PsiSystem) -> Result<Verdict> {
    let var = psi.variable();
    let mut devs = Vec::new();
    for m in var.midpoints() {
        devs.push((m, (psi.eval(m, m)? - m).abs()));
    }
    Ok(Verdict::new(
        "diagonal-midpoint-exactness",
        devs.iter().all(|(_, d)| *d <= MIDPOINT_EXACT_TOL),
        devs.iter()
            .map(|(m, d)| format!("|psi({m:.4},{m:.4}) - {m:.4}| = {d:.3e}"))
            .collect::<Vec<_>>()
            .join(", ")
            + &format!(" (tol {MIDPOINT_EXACT_TOL:e})"),
    ))
}

/// Largest decrease of `psi` along either axis of an `n x n` grid.
pub fn max_monotonicity_violation(psi: &PsiSystem, n: usize) -> Result<f64> {
    let grid = psi.variable().universe().grid(n);
    let mut z = vec![vec![0.0; n]; n];
    for (i, a) in grid.iter().enumerate() {
        for (j, b) in grid.iter().enumerate() {
            z[i][j] = psi.eval(*a, *b)?;
        }
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n {
                worst = worst.max(z[i][j] - z[i + 1][j]);
            }
            if j + 1 < n {
                worst = worst.max(z[i][j] - z[i][j + 1]);
            }
        }
    }
    Ok(worst)
}

pub fn monotonicity_audit(psi: &PsiSystem) -> Result<Verdict> {
    let worst = max_monotonicity_violation(psi, 101)?;
    let slack = MONOTONE_SLACK * unit(psi.variable());
    Ok(Verdict::new(
        "monotonicity",
        worst <= slack,
        format!("101x101 grid, max violation {worst:.3e} (slack {slack})"),
    ))
}

/// The newer input outweighs the earlier one.
pub fn second_input_dominance(psi: &PsiSystem) -> Result<Verdict> {
    use TermLabel::*;
    let var = psi.variable();
    let c = |l| var.center(l);
    let m1 = psi.eval(c(NeedMoreEffort), c(AsExpected))? - psi.eval(c(AsExpected), c(NeedMoreEffort))?;
    let m2 = psi.eval(c(Good), c(VeryGood))? - psi.eval(c(VeryGood), c(Good))?;
    let r1 = var.round_to_term(psi.eval(c(VeryGood), c(AsExpected))?);
    let r2 = var.round_to_term(psi.eval(c(AsExpected), c(VeryGood))?);
    let margin = DOMINANCE_MARGIN * unit(var);
    Ok(Verdict::new(
        "second-input-dominance",
        m1 >= margin && m2 >= margin && r1 == Good && r2 == Good,
        format!(
            "psi(NME,AE) - psi(AE,NME) = {m1:.4}, psi(G,VG) - psi(VG,G) = {m2:.4} (margin {margin}); psi(VG,AE) -> {r1}, psi(AE,VG) -> {r2}"
        ),
    ))
}

/// The combiner chain favours its first (accumulated) input.
pub fn combiner_first_input_dominance(combiner: &PsiSystem) -> Result<Verdict> {
    use TermLabel::*;
    let var = combiner.variable();
    let hi = combiner.eval(var.center(Good), var.center(AsExpected))?;
    let lo = combiner.eval(var.center(AsExpected), var.center(Good))?;
    Ok(Verdict::new(
        "combiner-first-input-dominance",
        hi > lo,
        format!("c(G,AE) = {hi:.4} > c(AE,G) = {lo:.4}"),
    ))
}

/// Flat `n^m` against hierarchical `(m - 1) n^2` for m = 2..8, n = 2..6.
pub fn rule_count_linearity() -> Result<Verdict> {
    let base = rule_count(5, 4)?;
    let mut ok = base.flat_count == 1024 && base.hierarchical_count == 64;
    for n in 2..=6u32 {
        let mut prev: Option<u64> = None;
        for m in 2..=8u32 {
            let r = rule_count(m, n)?;
            ok &= r.flat_count == u64::from(n).pow(m);
            ok &= r.hierarchical_levels == m - 1;
            ok &= r.hierarchical_count == u64::from((m - 1) * n * n);
            if let Some(p) = prev {
                ok &= r.hierarchical_count - p == u64::from(n * n);
            }
            prev = Some(r.hierarchical_count);
        }
    }
    Ok(Verdict::new(
        "rule-count",
        ok,
        format!(
            "m=5, n=4: flat {} vs hierarchical {} ({} systems x 16 rules); linear in m for m = 2..8, n = 2..6",
            base.flat_count, base.hierarchical_count, base.hierarchical_levels
        ),
    ))
}

/// Strict accumulator against the open-loop fold on seeded random sequences,
/// and the self-paired first update against the strict one.
pub fn fold_feedback_equivalence(psi: &PsiSystem, seed: u64, sequences: usize) -> Result<Verdict> {
    let u = *psi.variable().universe();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    let mut paired_worst = 0.0f64;
    for _ in 0..sequences {
        let len = rng.random_range(1..=20usize);
        let seq: Vec<f64> = (0..len).map(|_| rng.random_range(u.lo()..=u.hi())).collect();
        let mut acc = IndicatorAccumulator::new(AccumulatorMode::Strict);
        for x in &seq {
            acc = acc.update(psi, *x)?;
        }
        let folded = fold_open_loop(psi, &seq)?;
        if acc.current().map(f64::to_bits) != Some(folded.to_bits()) {
            mismatches += 1;
        }
        let paired = IndicatorAccumulator::new(AccumulatorMode::SelfPaired).update(psi, seq[0])?;
        paired_worst = paired_worst.max((paired.current().unwrap_or(f64::NAN) - seq[0]).abs());
    }
    let tol = SELF_PAIRED_TOL * unit(psi.variable());
    Ok(Verdict::new(
        "fold-feedback-equivalence",
        mismatches == 0 && paired_worst <= tol,
        format!(
            "{sequences} seeded sequences, {mismatches} bit mismatches; self-paired first update max deviation {paired_worst:.4} (tol {tol})"
        ),
    ))
}

/// Orderings and levels of the four scenarios.
pub fn scenario_verdict(runs: &[ScenarioRun], var: &LinguisticVariable) -> Verdict {
    use TermLabel::*;
    let mean = |k: ScenarioKind| runs.iter().find(|r| r.kind == k).map(ScenarioRun::mean_output);
    let (Some(dashed), Some(dotted), Some(dashdot), Some(solid)) = (
        mean(ScenarioKind::Dashed),
        mean(ScenarioKind::Dotted),
        mean(ScenarioKind::Dashdot),
        mean(ScenarioKind::Solid),
    ) else {
        return Verdict::new("scenario-orderings", false, "missing scenario runs".into());
    };
    let u = var.universe();
    let band = (u.lo() + 0.3 * u.width(), u.lo() + 0.5 * u.width());
    let dashed_rows = runs
        .iter()
        .find(|r| r.kind == ScenarioKind::Dashed)
        .map(|r| r.rows.iter().all(|row| (band.0..=band.1).contains(&row.x_out)))
        .unwrap_or(false);
    let terms = (
        var.round_to_term(dotted),
        var.round_to_term(solid),
        var.round_to_term(dashdot),
    );
    Verdict::new(
        "scenario-orderings",
        dashed_rows && dashdot > dotted && dotted > solid && terms == (Good, Good, VeryGood),
        format!(
            "dashed mean {dashed:.4} (every day in [{}, {}]: {dashed_rows}); dashdot {dashdot:.4} > dotted {dotted:.4} > solid {solid:.4}; dotted -> {}, solid -> {}, dashdot -> {}",
            band.0, band.1, terms.0, terms.1, terms.2
        ),
    )
}

/// Linguistic checkpoints of the combined school-year curve.
pub fn school_year_checkpoints(run: &FdesRun, var: &LinguisticVariable) -> Vec<Verdict> {
    use TermLabel::*;
    let at = |d| run.row(d).and_then(|r| r.final_value);
    let (g, vg) = (var.center(Good), var.center(VeryGood));
    let alpha1 = at(60);
    let alpha2 = at(90);
    let alpha3 = at(135);
    let tol = ALPHA3_TOL * unit(var);
    vec![
        Verdict::new(
            "alpha1-day60-good",
            alpha1.map(|x| var.round_to_term(x)) == Some(Good),
            format!("final(60) = {alpha1:.4?} -> {:?}", alpha1.map(|x| var.round_to_term(x))),
        ),
        Verdict::new(
            "alpha2-day90-between-good-and-very-good",
            alpha2.is_some_and(|x| g < x && x < vg),
            format!("final(90) = {alpha2:.4?}, open interval ({g:.4}, {vg:.4})"),
        ),
        Verdict::new(
            "alpha3-day135-near-good",
            alpha3.is_some_and(|x| (x - g).abs() <= tol),
            format!("final(135) = {alpha3:.4?}, |x - {g:.4}| <= {tol}"),
        ),
    ]
}

/// Largest day-to-day change of the combined curve.
pub fn max_daily_jump(run: &FdesRun) -> f64 {
    run.rows
        .windows(2)
        .filter_map(|w| Some((w[1].final_value? - w[0].final_value?).abs()))
        .fold(0.0, f64::max)
}

/// The invariant suite behind `fdes check`.
pub fn invariant_suite(engine: &FdesEngine) -> Result<Vec<Verdict>> {
    Ok(vec![
        table_fidelity(engine.psi())?,
        diagonal_near_identity(engine.psi())?,
        monotonicity_audit(engine.psi())?,
        second_input_dominance(engine.psi())?,
        combiner_first_input_dominance(engine.combiner())?,
        rule_count_linearity()?,
        fold_feedback_equivalence(engine.psi(), 0x5eed, 100)?,
    ])
}
