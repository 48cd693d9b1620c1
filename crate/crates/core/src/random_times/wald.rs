//! Monte Carlo check of the Wald identities at a random time.
//!
//! For compound Poisson and Levy specs the time form is used:
//! `E X_tau = E X_1 E tau` and `E (X_tau - E X_1 tau)^2 = Var X_1 E tau`.
//! For walks and renewal specs the identities hold at the embedded count:
//! `E (X_tau - c tau) = E Y E N_tau` and
//! `E (X_tau - c tau - E Y N_tau)^2 = Var Y E N_tau`.
//! Each z-score is a paired difference over its standard error.

use serde::Serialize;

use super::TimeRule;
use crate::error::Result;
use crate::parallel::map_chunks;
use crate::processes::{simulate_replicate, Caps, MaxSample, ProcessSpec, RunOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WaldForm {
    Time,
    Embedded,
}

#[derive(Debug, Clone, Serialize)]
pub struct WaldReport {
    pub form: WaldForm,
    pub n_reps: u64,
    pub mean_tau: f64,
    pub mean_n_tau: f64,
    /// `E X_tau` (time form) or `E (X_tau - c tau)` (embedded form).
    pub first_lhs: f64,
    /// `E X_1 E tau` or `E Y E N_tau`.
    pub first_rhs: f64,
    pub first_z: f64,
    pub second_lhs: f64,
    pub second_rhs: f64,
    pub second_z: f64,
}

impl WaldReport {
    /// Both z-scores within `limit`.
    pub fn passes(&self, limit: f64) -> bool {
        self.first_z.abs() <= limit && self.second_z.abs() <= limit
    }
}

#[derive(Default, Clone, Copy)]
struct Sums {
    n: u64,
    tau: f64,
    n_tau: f64,
    l1: f64,
    r1: f64,
    d1: f64,
    d1sq: f64,
    l2: f64,
    r2: f64,
    d2: f64,
    d2sq: f64,
}

impl Sums {
    fn merge(&mut self, o: &Sums) {
        self.n += o.n;
        self.tau += o.tau;
        self.n_tau += o.n_tau;
        self.l1 += o.l1;
        self.r1 += o.r1;
        self.d1 += o.d1;
        self.d1sq += o.d1sq;
        self.l2 += o.l2;
        self.r2 += o.r2;
        self.d2 += o.d2;
        self.d2sq += o.d2sq;
    }
}

fn z_score(sum: f64, sumsq: f64, n: u64) -> f64 {
    let n = n as f64;
    let mean = sum / n;
    let var = ((sumsq / n - mean * mean) * n / (n - 1.0).max(1.0)).max(0.0);
    let se = (var / n).sqrt();
    if se == 0.0 {
        if mean.abs() < 1e-12 {
            0.0
        } else {
            mean.signum() * f64::INFINITY
        }
    } else {
        mean / se
    }
}

/// Runs `n_reps` replicates and forms both identities.
pub fn wald_check(
    spec: &ProcessSpec,
    rule: &TimeRule,
    n_reps: u64,
    master_seed: u64,
    caps: &Caps,
    workers: Option<usize>,
) -> Result<WaldReport> {
    rule.validate()?;
    let form = if spec.is_levy_type() {
        WaldForm::Time
    } else {
        WaldForm::Embedded
    };
    let slope = spec.slope();
    let b = spec.jump().mean();
    let mu = spec.mean_x1();
    let (var_step, var_jump) = (spec.var_x1().unwrap_or(f64::NAN), spec.jump().variance());
    let opts = RunOptions { track_max: false };

    let per = |s: &MaxSample, acc: &mut Sums| {
        let (tau, n) = (s.tau, s.n_tau as f64);
        let (l1, r1, l2, r2) = match form {
            WaldForm::Time => {
                let c = s.x_tau - mu * tau;
                (s.x_tau, mu * tau, c * c, var_step * tau)
            }
            WaldForm::Embedded => {
                let net = s.x_tau - slope * tau;
                let c = net - b * n;
                (net, b * n, c * c, var_jump * n)
            }
        };
        acc.n += 1;
        acc.tau += tau;
        acc.n_tau += n;
        acc.l1 += l1;
        acc.r1 += r1;
        acc.d1 += l1 - r1;
        acc.d1sq += (l1 - r1).powi(2);
        acc.l2 += l2;
        acc.r2 += r2;
        acc.d2 += l2 - r2;
        acc.d2sq += (l2 - r2).powi(2);
    };

    let parts = map_chunks(n_reps, workers, |start, end| {
        let mut acc = Sums::default();
        for i in start..end {
            let s = simulate_replicate(spec, rule, master_seed, i, caps, opts)?;
            per(&s, &mut acc);
        }
        Ok(acc)
    })?;
    let mut t = Sums::default();
    for p in &parts {
        t.merge(p);
    }
    let n = t.n as f64;
    Ok(WaldReport {
        form,
        n_reps,
        mean_tau: t.tau / n,
        mean_n_tau: t.n_tau / n,
        first_lhs: t.l1 / n,
        first_rhs: t.r1 / n,
        first_z: z_score(t.d1, t.d1sq, t.n),
        second_lhs: t.l2 / n,
        second_rhs: t.r2 / n,
        second_z: z_score(t.d2, t.d2sq, t.n),
    })
}
