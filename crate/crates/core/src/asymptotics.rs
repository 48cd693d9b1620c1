//! Leading-order approximations of `P{M_tau > x}`.
//!
//! Every form is an average over horizon samples of an integral of a tail
//! over `[x, x + drift * horizon]`. With the jump tail `F` these integrals
//! are differences of the integrated tail, `F_I(x) - F_I(x + d)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distributions::TailModel;
use crate::error::{Error, Result};
use crate::processes::{ProcessKind, ProcessSpec};
use crate::quadrature::adaptive_simpson;
use crate::random_times::TimeRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ApproxForm {
    /// `(1/a) E int_x^{x + a N_tau} F`, compound renewal with any admissible time.
    #[serde(rename = "CRP_NTau")]
    CrpNTau,
    /// `(1/a) int_x^{x + a E N_t} F`, fixed horizon.
    #[serde(rename = "FixedTime_ENt")]
    FixedTimeENt,
    /// `(1/a) E int_x^{x + a tau} F`, random walk with a counting time `tau >= 1`.
    #[serde(rename = "RW_Tau")]
    RwTau,
    /// Compound Poisson, in terms of `N_tau`.
    #[serde(rename = "Poisson_NTau")]
    PoissonNTau,
    /// Compound Poisson, in terms of `lambda tau`.
    #[serde(rename = "Poisson_LambdaTau")]
    PoissonLambdaTau,
    /// Compound Poisson, through the tail of `X_1` (taken as `lambda F`).
    #[serde(rename = "Poisson_X1Tail")]
    PoissonX1Tail,
    /// Levy process, through the tail of `X_1` (taken as `lambda F`).
    #[serde(rename = "Levy_X1Tail")]
    LevyX1Tail,
}

impl ApproxForm {
    pub const ALL: [ApproxForm; 7] = [
        ApproxForm::CrpNTau,
        ApproxForm::FixedTimeENt,
        ApproxForm::RwTau,
        ApproxForm::PoissonNTau,
        ApproxForm::PoissonLambdaTau,
        ApproxForm::PoissonX1Tail,
        ApproxForm::LevyX1Tail,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ApproxForm::CrpNTau => "CRP_NTau",
            ApproxForm::FixedTimeENt => "FixedTime_ENt",
            ApproxForm::RwTau => "RW_Tau",
            ApproxForm::PoissonNTau => "Poisson_NTau",
            ApproxForm::PoissonLambdaTau => "Poisson_LambdaTau",
            ApproxForm::PoissonX1Tail => "Poisson_X1Tail",
            ApproxForm::LevyX1Tail => "Levy_X1Tail",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl fmt::Display for ApproxForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxResult {
    pub x: f64,
    pub value: f64,
    pub form: ApproxForm,
    pub n_samples: usize,
    /// Monte Carlo standard error of `value` from the horizon samples.
    pub std_error: f64,
}

/// Horizon samples in the shape a form expects.
#[derive(Debug, Clone, Copy)]
pub enum Horizons<'a> {
    /// Jump counts `N_tau`.
    Counts(&'a [u64]),
    /// Times `tau`.
    Times(&'a [f64]),
}

/// Tail of `X_1` used by the Levy form.
pub enum X1Tail<'a> {
    /// `v -> rate * P{Y > v}`.
    BigJumps { rate: f64, jump: &'a TailModel },
    /// Any non-increasing tail, integrated numerically.
    Custom(&'a dyn Fn(f64) -> f64),
}

/// `scale * mean(F_I(x) - F_I(x + d_i))` with its standard error, over
/// spans given as `(d, multiplicity)`.
fn mean_increment<I: Iterator<Item = (f64, u64)>>(
    x: f64,
    spans: I,
    n: usize,
    scale: f64,
    jump: &TailModel,
) -> (f64, f64, usize) {
    let fx = jump.integrated_tail(x);
    let nf = n as f64;
    let (mut m1, mut m2) = (0.0, 0.0);
    for (d, k) in spans {
        let v = if d > 0.0 {
            fx - jump.integrated_tail(x + d)
        } else {
            0.0
        };
        let w = k as f64 / nf;
        m1 += w * v;
        m2 += w * v * v;
    }
    moments(m1, m2, n, scale)
}

/// Count samples grouped by value.
fn count_spans(counts: &[u64], a: f64) -> impl Iterator<Item = (f64, u64)> {
    let mut h = std::collections::BTreeMap::new();
    for &c in counts {
        *h.entry(c).or_insert(0u64) += 1;
    }
    h.into_iter().map(move |(c, k)| (a * c as f64, k))
}

/// Mean and standard error from the first two sample moments.
fn moments(m1: f64, m2: f64, n: usize, scale: f64) -> (f64, f64, usize) {
    let nf = n as f64;
    let var = if n > 1 {
        ((m2 - m1 * m1) * nf / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    (scale * m1, scale * (var / nf).sqrt(), n)
}

fn result(
    x: f64,
    form: ApproxForm,
    (value, std_error, n_samples): (f64, f64, usize),
) -> ApproxResult {
    ApproxResult {
        x,
        value: value.max(0.0),
        form,
        n_samples,
        std_error,
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, "must be positive and finite"))
    }
}

/// `(1/a) E int_x^{x + a N_tau} F(y) dy` from samples of `N_tau`.
pub fn approx_crp(x: f64, ntau: &[u64], a: f64, jump: &TailModel) -> Result<ApproxResult> {
    positive("a", a)?;
    if ntau.is_empty() {
        return Err(Error::EmptySamples);
    }
    let r = mean_increment(x, count_spans(ntau, a), ntau.len(), 1.0 / a, jump);
    Ok(result(x, ApproxForm::CrpNTau, r))
}

/// `(1/a) int_x^{x + a E N_t} F(y) dy`.
pub fn approx_fixed_time(
    x: f64,
    expected_jumps: f64,
    a: f64,
    jump: &TailModel,
) -> Result<ApproxResult> {
    positive("a", a)?;
    if !(expected_jumps >= 0.0) {
        return Err(Error::param("expected_jumps", "must be non-negative"));
    }
    let (v, _, _) = mean_increment(
        x,
        std::iter::once((a * expected_jumps, 1)),
        1,
        1.0 / a,
        jump,
    );
    Ok(result(x, ApproxForm::FixedTimeENt, (v, 0.0, 0)))
}

/// `(1/a) E int_x^{x + a tau} F(y) dy` for counting horizons `tau >= 1`.
pub fn approx_rw(x: f64, tau: &[u64], a: f64, jump: &TailModel) -> Result<ApproxResult> {
    positive("a", a)?;
    if tau.is_empty() {
        return Err(Error::EmptySamples);
    }
    if let Some(&bad) = tau.iter().find(|&&t| t < 1) {
        return Err(Error::SampleBelowOne { value: bad });
    }
    let r = mean_increment(x, count_spans(tau, a), tau.len(), 1.0 / a, jump);
    Ok(result(x, ApproxForm::RwTau, r))
}

/// The three equivalent compound Poisson displays.
pub fn approx_poisson(
    x: f64,
    samples: Horizons<'_>,
    a: f64,
    rate: f64,
    jump: &TailModel,
    form: ApproxForm,
) -> Result<ApproxResult> {
    positive("a", a)?;
    positive("rate", rate)?;
    if !jump.is_heavy_tailed() {
        return Err(Error::LightTailedJumps);
    }
    let mismatch = |want: &str| Error::FormMismatch {
        form: form.name().into(),
        reason: format!("needs {want} samples"),
    };
    match (form, samples) {
        (ApproxForm::PoissonNTau, Horizons::Counts(n)) => {
            if n.is_empty() {
                return Err(Error::EmptySamples);
            }
            Ok(result(
                x,
                form,
                mean_increment(x, count_spans(n, a), n.len(), 1.0 / a, jump),
            ))
        }
        (ApproxForm::PoissonLambdaTau, Horizons::Times(t)) => {
            if t.is_empty() {
                return Err(Error::EmptySamples);
            }
            let spans = t.iter().map(|&s| (a * rate * s, 1));
            Ok(result(
                x,
                form,
                mean_increment(x, spans, t.len(), 1.0 / a, jump),
            ))
        }
        (ApproxForm::PoissonX1Tail, Horizons::Times(t)) => {
            let r = approx_levy(x, t, a * rate, &X1Tail::BigJumps { rate, jump })?;
            Ok(ApproxResult { form, ..r })
        }
        (ApproxForm::PoissonNTau, _) => Err(mismatch("N_tau")),
        (ApproxForm::PoissonLambdaTau | ApproxForm::PoissonX1Tail, _) => Err(mismatch("tau")),
        _ => Err(Error::FormMismatch {
            form: form.name().into(),
            reason: "not a compound Poisson form".into(),
        }),
    }
}

/// `(1/m) E int_x^{x + m tau} P{X_1 > y} dy`.
pub fn approx_levy(x: f64, tau: &[f64], m: f64, x1_tail: &X1Tail<'_>) -> Result<ApproxResult> {
    positive("m", m)?;
    if tau.is_empty() {
        return Err(Error::EmptySamples);
    }
    let form = ApproxForm::LevyX1Tail;
    match x1_tail {
        X1Tail::BigJumps { rate, jump } => {
            let spans = tau.iter().map(|&t| (m * t, 1));
            Ok(result(
                x,
                form,
                mean_increment(x, spans, tau.len(), rate / m, jump),
            ))
        }
        X1Tail::Custom(f) => {
            // integrate once between consecutive sorted endpoints
            let mut order: Vec<usize> = (0..tau.len()).collect();
            order.sort_by(|&i, &j| tau[i].total_cmp(&tau[j]));
            let mut vals = vec![0.0; tau.len()];
            let (mut prev, mut acc) = (0.0f64, 0.0);
            for &i in &order {
                let d = (m * tau[i]).max(0.0);
                if d > prev {
                    let scale = f(x + prev).abs().max(1e-300) * (d - prev);
                    acc += adaptive_simpson(f, x + prev, x + d, 1e-12 * scale.max(1e-280))?;
                    prev = d;
                }
                vals[i] = acc;
            }
            let n = tau.len() as f64;
            let m1: f64 = vals.iter().sum::<f64>() / n;
            let m2: f64 = vals.iter().map(|v| v * v).sum::<f64>() / n;
            Ok(result(x, form, moments(m1, m2, tau.len(), 1.0 / m)))
        }
    }
}

/// Checks that `form` applies to `spec` and `rule`.
pub fn check_applicable(form: ApproxForm, spec: &ProcessSpec, rule: &TimeRule) -> Result<()> {
    let mismatch = |reason: &str| Error::FormMismatch {
        form: form.name().into(),
        reason: reason.into(),
    };
    if !(spec.a() > 0.0) {
        return Err(Error::NonNegativeDrift {
            mean: spec.mean_increment_per_jump(),
        });
    }
    if !spec.jump().is_heavy_tailed() {
        return Err(Error::LightTailedJumps);
    }
    let poisson_like = match spec.kind() {
        ProcessKind::CompoundPoisson { .. } => true,
        ProcessKind::Levy { sigma, .. } => *sigma == 0.0,
        _ => false,
    };
    match form {
        ApproxForm::CrpNTau => {
            if matches!(spec.kind(), ProcessKind::Levy { sigma, .. } if *sigma > 0.0) {
                return Err(mismatch("process has a Brownian part"));
            }
        }
        ApproxForm::FixedTimeENt => {
            let constant = matches!(rule, TimeRule::FixedTime { .. })
                || matches!(
                    (spec.kind(), rule),
                    (
                        ProcessKind::RandomWalk { .. },
                        TimeRule::FixedJumpCount { .. }
                    )
                );
            if !constant {
                return Err(mismatch("needs a constant horizon"));
            }
        }
        ApproxForm::RwTau => {
            if !matches!(spec.kind(), ProcessKind::RandomWalk { .. }) {
                return Err(mismatch("needs a random walk"));
            }
        }
        ApproxForm::PoissonNTau | ApproxForm::PoissonLambdaTau | ApproxForm::PoissonX1Tail => {
            if !poisson_like {
                return Err(mismatch("needs a compound Poisson process"));
            }
        }
        ApproxForm::LevyX1Tail => {
            if !spec.is_levy_type() {
                return Err(mismatch("needs a Levy process"));
            }
        }
    }
    Ok(())
}

/// `E N_t` for a constant horizon; `None` when only a sample mean is available.
pub fn expected_jumps(spec: &ProcessSpec, rule: &TimeRule) -> Option<f64> {
    match (spec.kind(), rule) {
        (ProcessKind::RandomWalk { .. }, TimeRule::FixedJumpCount { n }) => Some(*n as f64),
        (ProcessKind::RandomWalk { .. }, TimeRule::FixedTime { t }) => Some(t.floor()),
        (ProcessKind::CompoundRenewal { spacing, .. }, TimeRule::FixedTime { t }) => {
            match spacing {
                crate::distributions::SpacingModel::Deterministic { period } => {
                    Some((t / period).floor())
                }
                crate::distributions::SpacingModel::Exponential { rate } => Some(rate * t),
                _ => None,
            }
        }
        (
            ProcessKind::CompoundPoisson { .. } | ProcessKind::Levy { .. },
            TimeRule::FixedTime { t },
        ) => Some(spec.rate() * t),
        _ => None,
    }
}
