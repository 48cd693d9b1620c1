//! Named numerical checks of the auxiliary identities and bounds.
//!
//! Each check returns a [`ValidationReport`] whose verdict can be recomputed
//! from its table and criterion alone.

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{approx_poisson, ApproxForm, Horizons};
use crate::distributions::{
    kesten_check, sstar_ratio, GridTail, SpacingModel, TailModel, MAX_GRID_POINTS, MAX_MASS_DEFECT,
    TAIL_FLOOR,
};
use crate::error::{Error, Result};
use crate::experiments::csv::float;
use crate::processes::{simulate_many, Caps, MaxSample, ProcessKind, ProcessSpec, RunOptions};
use crate::random_times::{wald_check, HorizonLaw, TimeRule};
use crate::rng::{self, StreamRole};

/// Largest convolution power accepted by [`validate_kesten`].
pub const MAX_KESTEN_N: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub label: String,
    pub point: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// z-score or standard error, when the check has one.
    pub score: Option<f64>,
}

impl ReportRow {
    fn new(label: impl Into<String>, point: f64, lhs: f64, rhs: f64, score: Option<f64>) -> Self {
        ReportRow {
            label: label.into(),
            point,
            lhs,
            rhs,
            ratio: lhs / rhs,
            score,
        }
    }
}

/// Pass rule of a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    /// Last ratio in `[lo, hi]` and `|ratio - 1|` non-increasing over the
    /// second half of the grid.
    Sstar { lo: f64, hi: f64 },
    /// Per-n constants at most `C_hat`, `C_hat` finite and below the
    /// ceiling, mass defects at most the limit.
    Kesten { ceiling: f64, max_mass_defect: f64 },
    /// Every `|z| <= z_limit`.
    Wald { z_limit: f64 },
    /// Every rule estimate at most its bound.
    LemmaSup,
    /// Ratios at the largest point within `[lo, hi]`; rows with `rhs = 0`
    /// are skipped.
    StoppingT { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub name: String,
    pub inputs: String,
    pub seed: Option<u64>,
    pub criterion: Criterion,
    pub rows: Vec<ReportRow>,
    pub pass: bool,
}

impl ValidationReport {
    fn build(
        name: &str,
        inputs: String,
        seed: Option<u64>,
        criterion: Criterion,
        rows: Vec<ReportRow>,
    ) -> Self {
        let mut r = ValidationReport {
            name: name.into(),
            inputs,
            seed,
            criterion,
            rows,
            pass: false,
        };
        r.pass = r.recheck();
        r
    }

    /// Recomputes the verdict from the table.
    pub fn recheck(&self) -> bool {
        let rows = &self.rows;
        match self.criterion {
            Criterion::Sstar { lo, hi } => {
                let Some(last) = rows.last() else {
                    return false;
                };
                let dev: Vec<f64> = rows.iter().map(|r| (r.ratio - 1.0).abs()).collect();
                let tail = &dev[dev.len() / 2..];
                (lo..=hi).contains(&last.ratio) && tail.windows(2).all(|w| w[1] <= w[0])
            }
            Criterion::Kesten {
                ceiling,
                max_mass_defect,
            } => rows.iter().all(|r| match r.label.as_str() {
                "per_n" => r.lhs <= r.rhs,
                "c_hat" => r.lhs.is_finite() && r.lhs < r.rhs && r.rhs == ceiling,
                "mass_defect" => r.lhs <= r.rhs && r.rhs == max_mass_defect,
                _ => false,
            }),
            Criterion::Wald { z_limit } => {
                !rows.is_empty()
                    && rows
                        .iter()
                        .all(|r| r.score.is_some_and(|z| z.abs() <= z_limit))
            }
            Criterion::LemmaSup => rows
                .iter()
                .filter(|r| r.label != "sup")
                .all(|r| r.lhs <= r.rhs),
            Criterion::StoppingT { lo, hi } => {
                let Some(xmax) = rows.iter().map(|r| r.point).reduce(f64::max) else {
                    return false;
                };
                rows.iter()
                    .filter(|r| r.point == xmax && r.rhs > 0.0)
                    .all(|r| (lo..=hi).contains(&r.ratio))
            }
        }
    }

    /// `label,point,lhs,rhs,ratio,score` with one row per table entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,point,lhs,rhs,ratio,score\n");
        for r in &self.rows {
            let score = r.score.map(float).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.label,
                float(r.point),
                float(r.lhs),
                float(r.rhs),
                float(r.ratio),
                score
            ));
        }
        out
    }

    /// One-line JSON verdict record.
    pub fn verdict_line(&self) -> String {
        serde_json::json!({
            "name": self.name,
            "verdict": if self.pass { "pass" } else { "fail" },
            "criterion": self.criterion,
            "seed": self.seed,
            "inputs": self.inputs,
            "rows": self.rows.len(),
        })
        .to_string()
    }
}

fn summary<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

/// Table of `sstar_ratio` over an increasing grid.
///
/// `lhs` is the convolution integral over `F(x)`, `rhs` is `2 a+`. A tail
/// that underflows at a grid point is recorded with an infinite ratio.
pub fn validate_sstar(model: &TailModel, x_grid: &[f64]) -> Result<ValidationReport> {
    if model.support_max().is_finite() {
        return Err(Error::NotHeavyTailed);
    }
    check_grid(x_grid)?;
    let two_a = 2.0 * model.a_plus();
    let rows = x_grid
        .iter()
        .map(|&x| {
            let r = match sstar_ratio(model, x) {
                Ok(r) => r,
                Err(Error::TailUnderflow { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            Ok(ReportRow::new("sstar", x, r * two_a, two_a, None))
        })
        .collect::<Result<Vec<_>>>()?;
    let inputs = summary(&serde_json::json!({ "model": model, "x_grid": x_grid }));
    Ok(ValidationReport::build(
        "sstar",
        inputs,
        None,
        Criterion::Sstar { lo: 0.9, hi: 1.25 },
        rows,
    ))
}

fn check_grid(x_grid: &[f64]) -> Result<()> {
    if x_grid.is_empty() {
        return Err(Error::param("x_grid", "empty"));
    }
    if x_grid.windows(2).any(|w| !(w[1] > w[0])) || x_grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::param(
            "x_grid",
            "must be finite and strictly increasing",
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KestenOptions {
    /// Linear slope `c` in `G(x) = min(1, (1/c) E int_0^{c tau} F(x + y) dy)`.
    pub c: f64,
    pub horizon_draws: usize,
    pub seed: u64,
    /// Grid step; defaults to `a+ / 100`.
    pub step: Option<f64>,
    pub ceiling: f64,
}

impl Default for KestenOptions {
    fn default() -> Self {
        KestenOptions {
            c: 1.0,
            horizon_draws: 256,
            seed: 0,
            step: None,
            ceiling: 1e4,
        }
    }
}

/// `G(x) = min(1, (1/c) mean_i [F_I(x) - F_I(x + c tau_i)])` over horizon draws.
pub fn horizon_tail(model: &TailModel, c: f64, draws: &[f64], x: f64) -> f64 {
    let fx = model.integrated_tail(x);
    let s: f64 = draws
        .iter()
        .map(|&t| fx - model.integrated_tail(x + c * t))
        .sum();
    (s / (c * draws.len() as f64)).clamp(0.0, 1.0)
}

/// Horizon draws `tau_i` from `(seed, i)` horizon streams.
pub fn horizon_draws(law: &HorizonLaw, n: usize, seed: u64) -> Vec<f64> {
    (0..n as u64)
        .map(|i| {
            law.sample(&mut rng::stream(seed, i, StreamRole::Horizon, 0))
                .max(0.0)
        })
        .collect()
}

/// Kesten-type bound on the convolution powers of the horizon tail `G`.
pub fn validate_kesten(
    model: &TailModel,
    horizon: &HorizonLaw,
    delta: f64,
    n_max: usize,
    opts: &KestenOptions,
) -> Result<ValidationReport> {
    if n_max == 0 || n_max > MAX_KESTEN_N {
        return Err(Error::param("n_max", "must lie in 1..=12"));
    }
    if !(opts.c > 0.0 && opts.c.is_finite()) {
        return Err(Error::param("c", "must be positive"));
    }
    if opts.horizon_draws == 0 {
        return Err(Error::param("horizon_draws", "must be at least 1"));
    }
    let step = opts.step.unwrap_or(0.01 * model.a_plus());
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param("step", "must be positive"));
    }
    let draws = horizon_draws(horizon, opts.horizon_draws, opts.seed);
    let grid = tabulate(step, |x| horizon_tail(model, opts.c, &draws, x))?;
    let rep = kesten_check(&grid, delta, n_max)?;

    let mut rows = Vec::with_capacity(2 * n_max + 1);
    for (n, (&k, &d)) in rep.per_n.iter().zip(&rep.mass_defect).enumerate() {
        rows.push(ReportRow::new("per_n", (n + 1) as f64, k, rep.c_hat, None));
        rows.push(ReportRow::new(
            "mass_defect",
            (n + 1) as f64,
            d,
            MAX_MASS_DEFECT,
            None,
        ));
    }
    rows.push(ReportRow::new(
        "c_hat",
        rep.grid_points as f64,
        rep.c_hat,
        opts.ceiling,
        None,
    ));
    let inputs = summary(&serde_json::json!({
        "model": model, "horizon": horizon, "delta": delta, "n_max": n_max,
        "options": opts, "step": step, "grid_points": rep.grid_points,
    }));
    Ok(ValidationReport::build(
        "kesten",
        inputs,
        Some(opts.seed),
        Criterion::Kesten {
            ceiling: opts.ceiling,
            max_mass_defect: MAX_MASS_DEFECT,
        },
        rows,
    ))
}

/// Samples a non-increasing tail block by block until it drops below the
/// floor. Blocks are evaluated in parallel.
fn tabulate<F: Fn(f64) -> f64 + Sync>(step: f64, g: F) -> Result<GridTail> {
    const BLOCK: usize = 1 << 16;
    let mut values: Vec<f64> = Vec::new();
    loop {
        let base = values.len();
        let block: Vec<f64> = (base..base + BLOCK)
            .into_par_iter()
            .map(|i| g(i as f64 * step))
            .collect();
        let mut prev = values.last().copied().unwrap_or(1.0);
        for v in block {
            // absorb rounding noise so the lattice masses stay non-negative
            let v = v.min(prev);
            values.push(v);
            prev = v;
            if v < TAIL_FLOOR {
                return GridTail::from_values(step, values);
            }
        }
        if values.len() >= MAX_GRID_POINTS {
            return Err(Error::param(
                "step",
                "tail does not reach the floor within the grid limit",
            ));
        }
    }
}

/// Both Wald identities at `rule`, as a report.
pub fn validate_wald(
    spec: &ProcessSpec,
    rule: &TimeRule,
    n_reps: u64,
    seed: u64,
    caps: &Caps,
    workers: Option<usize>,
) -> Result<ValidationReport> {
    let w = wald_check(spec, rule, n_reps, seed, caps, workers)?;
    let rows = vec![
        ReportRow::new(
            "first",
            w.mean_tau,
            w.first_lhs,
            w.first_rhs,
            Some(w.first_z),
        ),
        ReportRow::new(
            "second",
            w.mean_tau,
            w.second_lhs,
            w.second_rhs,
            Some(w.second_z),
        ),
    ];
    let inputs = summary(&serde_json::json!({
        "process": spec, "rule": rule, "n_reps": n_reps, "form": w.form,
    }));
    Ok(ValidationReport::build(
        "wald",
        inputs,
        Some(seed),
        Criterion::Wald { z_limit: 4.0 },
        rows,
    ))
}

/// The same process observed as `X_t - k t`.
fn tilted(spec: &ProcessSpec, k: f64) -> Result<ProcessSpec> {
    let kind = match *spec.kind() {
        ProcessKind::RandomWalk { jump } => ProcessKind::CompoundRenewal {
            c: -k,
            spacing: SpacingModel::deterministic(1.0)?,
            jump,
        },
        ProcessKind::CompoundRenewal { c, spacing, jump } => ProcessKind::CompoundRenewal {
            c: c - k,
            spacing,
            jump,
        },
        ProcessKind::CompoundPoisson { c, rate, jump } => ProcessKind::CompoundPoisson {
            c: c - k,
            rate,
            jump,
        },
        ProcessKind::Levy {
            drift,
            sigma,
            big_jump_rate,
            big_jump,
        } => ProcessKind::Levy {
            drift: drift - k,
            sigma,
            big_jump_rate,
            big_jump,
        },
    };
    ProcessSpec::unchecked_drift(kind)
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, (var / n).sqrt())
}

fn complete(samples: Vec<Option<MaxSample>>) -> Result<Vec<MaxSample>> {
    let n_reps = samples.len() as u64;
    let censored = samples.iter().filter(|s| s.is_none()).count() as u64;
    if censored > 0 {
        return Err(Error::Censoring { censored, n_reps });
    }
    Ok(samples.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaSupOptions {
    pub seed: u64,
    pub caps: Caps,
    /// Length of the paths used for the supremum estimate.
    pub sup_horizon: f64,
}

/// `E(X_tau - (E X_1 + eps) tau)` for each rule against a Monte Carlo
/// estimate of `E sup_t (X_t - (E X_1 + eps) t)`; the drift is signed.
pub fn validate_lemma_sup(
    spec: &ProcessSpec,
    epsilon: f64,
    rules: &[TimeRule],
    n_reps: u64,
    opts: &LemmaSupOptions,
    workers: Option<usize>,
) -> Result<ValidationReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::param("epsilon", "must be positive"));
    }
    if n_reps < 2 {
        return Err(Error::param("n_reps", "must be at least 2"));
    }
    if !(opts.sup_horizon > 0.0 && opts.sup_horizon.is_finite()) {
        return Err(Error::param("sup_horizon", "must be positive"));
    }
    let k = -spec.m() + epsilon;
    let sup_spec = tilted(spec, k)?;
    let sup_rule = TimeRule::fixed_time(opts.sup_horizon);
    let sups = complete(simulate_many(
        &sup_spec,
        &sup_rule,
        rng::stream_seed(opts.seed, 0, StreamRole::Auxiliary, 0),
        n_reps,
        &opts.caps,
        RunOptions::default(),
        workers,
    )?)?;
    let (sup_mean, sup_se) = mean_se(&sups.iter().map(|s| s.m_tau).collect::<Vec<_>>());
    let bound = sup_mean + 3.0 * sup_se;

    let mut rows = vec![ReportRow::new(
        "sup",
        opts.sup_horizon,
        sup_mean,
        bound,
        Some(sup_se),
    )];
    for (i, rule) in rules.iter().enumerate() {
        let s = complete(simulate_many(
            spec,
            rule,
            rng::stream_seed(opts.seed, i as u64 + 1, StreamRole::Auxiliary, 0),
            n_reps,
            &opts.caps,
            RunOptions { track_max: false },
            workers,
        )?)?;
        let v: Vec<f64> = s.iter().map(|s| s.x_tau - k * s.tau).collect();
        let (mean, se) = mean_se(&v);
        rows.push(ReportRow::new(
            rule.to_string(),
            i as f64,
            mean,
            bound,
            Some(se),
        ));
    }
    let inputs = summary(&serde_json::json!({
        "process": spec, "epsilon": epsilon, "rules": rules, "n_reps": n_reps, "options": opts,
    }));
    Ok(ValidationReport::build(
        "lemma_sup",
        inputs,
        Some(opts.seed),
        Criterion::LemmaSup,
        rows,
    ))
}

/// Compares `E int_0^{a lambda tau} F(x + y) dy` (through the `N_tau` and
/// `lambda tau` forms) with `a lambda E tau F(x)` for rules capped at `t_max`.
#[allow(clippy::too_many_arguments)]
pub fn validate_stopping_t(
    spec: &ProcessSpec,
    rules: &[TimeRule],
    t_max: f64,
    x_grid: &[f64],
    n_reps: u64,
    seed: u64,
    caps: &Caps,
    workers: Option<usize>,
) -> Result<ValidationReport> {
    check_grid(x_grid)?;
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::param("t_max", "must be finite and non-negative"));
    }
    let poisson = match spec.kind() {
        ProcessKind::CompoundPoisson { .. } => true,
        ProcessKind::Levy { sigma, .. } => *sigma == 0.0,
        _ => false,
    };
    if !poisson {
        return Err(Error::FormMismatch {
            form: ApproxForm::PoissonNTau.name().into(),
            reason: "needs a compound Poisson process".into(),
        });
    }
    let (a, rate, jump) = (spec.a(), spec.rate(), spec.jump());
    let mut rows = Vec::new();
    for (i, rule) in rules.iter().enumerate() {
        let capped = TimeRule::min_of(rule.clone(), TimeRule::fixed_time(t_max));
        let s = complete(simulate_many(
            spec,
            &capped,
            rng::stream_seed(seed, i as u64, StreamRole::Auxiliary, 1),
            n_reps,
            caps,
            RunOptions { track_max: false },
            workers,
        )?)?;
        let counts: Vec<u64> = s.iter().map(|s| s.n_tau).collect();
        let times: Vec<f64> = s.iter().map(|s| s.tau).collect();
        let mean_tau = times.iter().sum::<f64>() / times.len() as f64;
        for &x in x_grid {
            let rhs = a * rate * mean_tau * jump.tail_bar(x);
            for (form, h) in [
                (ApproxForm::PoissonNTau, Horizons::Counts(&counts)),
                (ApproxForm::PoissonLambdaTau, Horizons::Times(&times)),
            ] {
                let v = approx_poisson(x, h, a, rate, jump, form)?;
                let lhs = a * v.value;
                let mut row =
                    ReportRow::new(format!("{rule}|{form}"), x, lhs, rhs, Some(a * v.std_error));
                if rhs == 0.0 {
                    row.ratio = f64::NAN;
                }
                rows.push(row);
            }
        }
    }
    let inputs = summary(&serde_json::json!({
        "process": spec, "rules": rules, "t_max": t_max, "x_grid": x_grid, "n_reps": n_reps,
    }));
    Ok(ValidationReport::build(
        "stopping_t",
        inputs,
        Some(seed),
        Criterion::StoppingT { lo: 0.8, hi: 1.2 },
        rows,
    ))
}
