//! Grid check of the geometric bound `G^{*n}(x) <= C (1 + delta)^n G(x)`.
//!
//! A tail `G` sampled at `x_i = i h` is read as a lattice law with
//! `P{L = 0} = 1 - G(0)` and `P{L = x_i} = G(x_{i-1}) - G(x_i)`, so that
//! `P{L > x_i} = G(x_i)` exactly. Tails of the `n`-fold sums are then
//! propagated by FFT convolution up to the truncation point.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};

/// Grid points with a tail below this are dropped.
pub const TAIL_FLOOR: f64 = 1e-10;
/// Largest mass defect tolerated before the grid is declared too coarse.
pub const MAX_MASS_DEFECT: f64 = 1e-6;
/// Upper bound on retained grid points.
pub const MAX_GRID_POINTS: usize = 1 << 24;

/// A non-increasing tail sampled on `0, h, 2h, ...`.
#[derive(Debug, Clone)]
pub struct GridTail {
    step: f64,
    values: Vec<f64>,
}

impl GridTail {
    /// Samples `g` until it falls below [`TAIL_FLOOR`]; the first point
    /// below the floor is kept as the truncation point.
    pub fn from_fn<F: FnMut(f64) -> f64>(step: f64, mut g: F) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::param("step", "must be positive"));
        }
        let mut values = Vec::new();
        loop {
            let v = g(values.len() as f64 * step);
            values.push(v);
            if v < TAIL_FLOOR {
                break;
            }
            if values.len() >= MAX_GRID_POINTS {
                return Err(Error::param(
                    "step",
                    "tail does not reach the floor within the grid limit",
                ));
            }
        }
        Self::from_values(step, values)
    }

    pub fn from_values(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::param("step", "must be positive"));
        }
        if values.is_empty() {
            return Err(Error::param("values", "empty grid"));
        }
        if values[0] > 1.0 || values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::param("values", "tail must lie in [0, 1]"));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::param("values", "tail must be non-increasing"));
        }
        Ok(GridTail { step, values })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of grid points where the sup is taken.
    pub fn retained(&self) -> usize {
        self.values.iter().take_while(|v| **v >= TAIL_FLOOR).count()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KestenReport {
    pub delta: f64,
    pub step: f64,
    pub grid_points: usize,
    /// `sup_x G^{*n}(x) / ((1 + delta)^n G(x))` for `n = 1..=n_max`.
    pub per_n: Vec<f64>,
    pub c_hat: f64,
    /// `|1 - sum pmf_n - tail_n(K)|` per `n`.
    pub mass_defect: Vec<f64>,
    /// The bound with `c_hat` holds at every retained point.
    pub bound_holds: bool,
}

struct Convolver {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Convolver {
    fn new(points: usize) -> Self {
        let len = (2 * points).next_power_of_two();
        let mut planner = FftPlanner::new();
        Convolver {
            len,
            fwd: planner.plan_fft_forward(len),
            inv: planner.plan_fft_inverse(len),
        }
    }

    fn spectrum(&self, v: &[f64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for (b, x) in buf.iter_mut().zip(v) {
            b.re = *x;
        }
        self.fwd.process(&mut buf);
        buf
    }

    /// First `out.len()` terms of the linear convolution with `spec`'s source.
    fn apply(&self, lhs: &[Complex64], spec: &[Complex64], out: &mut [f64]) {
        let mut buf: Vec<Complex64> = lhs.iter().zip(spec).map(|(a, b)| a * b).collect();
        self.inv.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        for (o, b) in out.iter_mut().zip(&buf) {
            *o = b.re * scale;
        }
    }
}

/// Runs the n-fold convolution check for `n = 1..=n_max`.
pub fn kesten_check(g: &GridTail, delta: f64, n_max: usize) -> Result<KestenReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::param("delta", "must be positive"));
    }
    if n_max == 0 {
        return Err(Error::param("n_max", "must be at least 1"));
    }
    let gv = &g.values;
    let k = gv.len();
    let retained = g.retained();
    let mut p = vec![0.0; k];
    p[0] = 1.0 - gv[0];
    for i in 1..k {
        p[i] = gv[i - 1] - gv[i];
    }

    let conv = Convolver::new(k);
    let p_spec = conv.spectrum(&p);
    let g_spec = conv.spectrum(gv);

    let mut pmf = p.clone();
    let mut tail = gv.clone();
    let mut per_n = Vec::with_capacity(n_max);
    let mut defects = Vec::with_capacity(n_max);

    let mut record = |n: usize, pmf: &[f64], tail: &[f64]| -> Result<()> {
        let defect = (1.0 - pmf.iter().sum::<f64>() - tail[k - 1]).abs();
        defects.push(defect);
        if defect > MAX_MASS_DEFECT {
            return Err(Error::GridTooCoarse { defect });
        }
        let growth = (1.0 + delta).powi(n as i32);
        let sup = (0..retained)
            .map(|i| tail[i].max(0.0) / (growth * gv[i]))
            .fold(0.0, f64::max);
        per_n.push(sup);
        Ok(())
    };
    record(1, &pmf, &tail)?;

    let mut next_pmf = vec![0.0; k];
    let mut add = vec![0.0; k];
    for n in 2..=n_max {
        let pmf_spec = conv.spectrum(&pmf);
        conv.apply(&pmf_spec, &p_spec, &mut next_pmf);
        conv.apply(&pmf_spec, &g_spec, &mut add);
        for (t, a) in tail.iter_mut().zip(&add) {
            *t += a;
        }
        std::mem::swap(&mut pmf, &mut next_pmf);
        record(n, &pmf, &tail)?;
    }

    let c_hat = per_n.iter().copied().fold(0.0, f64::max);
    // every per-n sup is below c_hat, hence so is every retained point
    let bound_holds = c_hat.is_finite() && per_n.iter().all(|v| *v <= c_hat);
    Ok(KestenReport {
        delta,
        step: g.step,
        grid_points: retained,
        per_n,
        c_hat,
        mass_defect: defects,
        bound_holds,
    })
}
