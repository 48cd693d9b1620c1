use serde::Serialize;

use super::config::ExperimentConfig;
use super::csv::{float, write_estimates};
use super::wilson::{wilson_interval, Z95};
use crate::asymptotics::{
    approx_crp, approx_fixed_time, approx_levy, approx_poisson, approx_rw, check_applicable,
    expected_jumps, ApproxForm, ApproxResult, Horizons, X1Tail,
};
use crate::error::{Error, Result};
use crate::parallel::map_chunks;
use crate::processes::{simulate_replicate, ProcessSpec, RunOptions};

/// Largest censored fraction a run may have.
pub const MAX_CENSORED_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub x: f64,
    pub hits: u64,
    pub n_reps: u64,
    pub censored: u64,
    /// `hits / (n_reps - censored)`.
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub approx: Vec<ApproxResult>,
}

impl TailEstimate {
    pub fn misses(&self) -> u64 {
        self.n_reps - self.censored - self.hits
    }

    pub fn approx_for(&self, form: ApproxForm) -> Option<&ApproxResult> {
        self.approx.iter().find(|a| a.form == form)
    }
}

/// Horizon samples of the uncensored replicates, in replicate order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HorizonSamples {
    pub counts: Vec<u64>,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub estimates: Vec<TailEstimate>,
    pub horizons: HorizonSamples,
}

struct Chunk {
    /// `below[k]`: replicates whose maximum exceeds exactly `k` grid points.
    below: Vec<u64>,
    censored: u64,
    horizons: HorizonSamples,
}

fn run_replicates(
    cfg: &ExperimentConfig,
    spec: &ProcessSpec,
    track_max: bool,
    keep: bool,
    workers: Option<usize>,
) -> Result<(Vec<u64>, u64, HorizonSamples)> {
    let grid = &cfg.x_grid;
    let opts = RunOptions { track_max };
    let chunks = map_chunks(cfg.n_reps, workers, |start, end| {
        let mut c = Chunk {
            below: vec![0; grid.len() + 1],
            censored: 0,
            horizons: HorizonSamples::default(),
        };
        for i in start..end {
            match simulate_replicate(spec, &cfg.rule, cfg.master_seed, i, &cfg.caps, opts) {
                Ok(s) => {
                    c.below[grid.partition_point(|&x| x < s.m_tau)] += 1;
                    if keep {
                        c.horizons.counts.push(s.n_tau);
                        c.horizons.times.push(s.tau);
                    }
                }
                Err(Error::CapExceeded { .. }) => c.censored += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(c)
    })?;
    let mut below = vec![0u64; grid.len() + 1];
    let mut censored = 0;
    let mut horizons = HorizonSamples::default();
    for c in chunks {
        for (b, v) in below.iter_mut().zip(&c.below) {
            *b += v;
        }
        censored += c.censored;
        horizons.counts.extend(c.horizons.counts);
        horizons.times.extend(c.horizons.times);
    }
    if censored as f64 > MAX_CENSORED_FRACTION * cfg.n_reps as f64 {
        return Err(Error::Censoring {
            censored,
            n_reps: cfg.n_reps,
        });
    }
    Ok((below, censored, horizons))
}

/// Evaluates one form at `x` on shared horizon samples.
pub fn evaluate_form(
    form: ApproxForm,
    x: f64,
    cfg: &ExperimentConfig,
    spec: &ProcessSpec,
    h: &HorizonSamples,
) -> Result<ApproxResult> {
    check_applicable(form, spec, &cfg.rule)?;
    let (a, jump) = (spec.a(), spec.jump());
    match form {
        ApproxForm::CrpNTau => approx_crp(x, &h.counts, a, jump),
        ApproxForm::FixedTimeENt => {
            let en = match expected_jumps(spec, &cfg.rule) {
                Some(v) => v,
                None if h.counts.is_empty() => return Err(Error::EmptySamples),
                None => h.counts.iter().map(|&n| n as f64).sum::<f64>() / h.counts.len() as f64,
            };
            approx_fixed_time(x, en, a, jump)
        }
        ApproxForm::RwTau => approx_rw(x, &h.counts, a, jump),
        ApproxForm::PoissonNTau => {
            approx_poisson(x, Horizons::Counts(&h.counts), a, spec.rate(), jump, form)
        }
        ApproxForm::PoissonLambdaTau | ApproxForm::PoissonX1Tail => {
            approx_poisson(x, Horizons::Times(&h.times), a, spec.rate(), jump, form)
        }
        ApproxForm::LevyX1Tail => approx_levy(
            x,
            &h.times,
            spec.m(),
            &X1Tail::BigJumps {
                rate: spec.rate(),
                jump,
            },
        ),
    }
}

/// Empirical `P{M_tau > x}` on the grid from one set of replicates, with
/// the configured forms evaluated on the same replicates' horizons.
pub fn mc_tail_estimate(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<RunOutput> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    for f in &cfg.forms {
        check_applicable(*f, &spec, &cfg.rule)?;
    }
    let keep = !cfg.forms.is_empty();
    let (below, censored, horizons) = run_replicates(cfg, &spec, true, keep, workers)?;
    let used = cfg.n_reps - censored;
    let mut estimates = Vec::with_capacity(cfg.x_grid.len());
    for (j, &x) in cfg.x_grid.iter().enumerate() {
        let hits: u64 = below[j + 1..].iter().sum();
        let p_hat = if used == 0 {
            0.0
        } else {
            hits as f64 / used as f64
        };
        let (ci_lo, ci_hi) = wilson_interval(hits, used, Z95);
        let approx = cfg
            .forms
            .iter()
            .map(|&f| evaluate_form(f, x, cfg, &spec, &horizons))
            .collect::<Result<Vec<_>>>()?;
        estimates.push(TailEstimate {
            x,
            hits,
            n_reps: cfg.n_reps,
            censored,
            p_hat,
            ci_lo,
            ci_hi,
            approx,
        });
    }
    Ok(RunOutput {
        estimates,
        horizons,
    })
}

/// Forms only, from horizon samples simulated without path maxima.
/// Columns: `x` then `<form>_approx,<form>_se` per form.
pub fn approx_only(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<String> {
    cfg.validate()?;
    if cfg.forms.is_empty() {
        return Err(Error::Config("no approximation forms configured".into()));
    }
    let spec = cfg.spec()?;
    for f in &cfg.forms {
        check_applicable(*f, &spec, &cfg.rule)?;
    }
    let (_, _, h) = run_replicates(cfg, &spec, false, true, workers)?;
    let mut out = String::from("x");
    for f in &cfg.forms {
        out.push_str(&format!(",{f}_approx,{f}_se"));
    }
    out.push('\n');
    for &x in &cfg.x_grid {
        out.push_str(&float(x));
        for &f in &cfg.forms {
            let r = evaluate_form(f, x, cfg, &spec, &h)?;
            out.push_str(&format!(",{},{}", float(r.value), float(r.std_error)));
        }
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormSummary {
    pub form: ApproxForm,
    pub x: f64,
    pub ratio: f64,
    /// `[ci_lo, ci_hi] / approx`.
    pub band_lo: f64,
    pub band_hi: f64,
    /// Grid points where this form falls below the regime guard.
    pub outside_regime: Vec<f64>,
}

impl FormSummary {
    pub fn line(&self) -> String {
        serde_json::to_string(self).expect("summary serializes")
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub run: RunOutput,
    pub csv: String,
    pub summary: Vec<FormSummary>,
}

/// Estimates plus per-form ratios and a summary at the largest grid point.
pub fn compare(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<CompareOutput> {
    if cfg.forms.is_empty() {
        return Err(Error::FormMismatch {
            form: "none".into(),
            reason: "compare needs at least one approximation form".into(),
        });
    }
    let spec = cfg.spec()?;
    let run = mc_tail_estimate(cfg, workers)?;
    let csv = write_estimates(&run.estimates, &cfg.forms);
    let last = run.estimates.last().expect("non-empty grid");
    let summary = cfg
        .forms
        .iter()
        .map(|&form| {
            let v = last.approx_for(form).map_or(f64::NAN, |a| a.value);
            let outside_regime = match cfg.regime_guard {
                Some(g) => run
                    .estimates
                    .iter()
                    .filter(|e| {
                        e.approx_for(form)
                            .is_some_and(|a| a.value < g * spec.jump().tail_bar(e.x))
                    })
                    .map(|e| e.x)
                    .collect(),
                None => Vec::new(),
            };
            FormSummary {
                form,
                x: last.x,
                ratio: last.p_hat / v,
                band_lo: last.ci_lo / v,
                band_hi: last.ci_hi / v,
                outside_regime,
            }
        })
        .collect();
    Ok(CompareOutput { run, csv, summary })
}
