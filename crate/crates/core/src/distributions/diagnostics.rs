//! Finite-x indicators of strong subexponentiality and long tails.
//!
//! These are diagnostics, not proofs: a ratio near one at the largest
//! grid point is evidence, nothing more.

use super::TailModel;
use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

/// `int_0^x F(x-y) F(y) dy / (2 a+ F(x))` with `F` the tail of `model`.
pub fn sstar_ratio(model: &TailModel, x: f64) -> Result<f64> {
    let a_plus = model.a_plus();
    if !(a_plus > 0.0) {
        return Err(Error::param("model", "a+ must be positive"));
    }
    let log_fx = model.log_tail_bar(x);
    if !log_fx.is_finite() || model.tail_bar(x) == 0.0 && !model.is_heavy_tailed() {
        return Err(Error::TailUnderflow { x });
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    // symmetric integrand: integrate over [0, x/2] and double
    let half = 0.5 * x;
    let f = |y: f64| (model.log_tail_bar(x - y) + model.log_tail_bar(y) - log_fx).exp();
    let mut cuts = vec![0.0, half];
    let mut s = 1.0 / 16.0;
    while s < half {
        cuts.push(s);
        s *= 2.0;
    }
    for k in [model.support_min(), x - model.support_min()] {
        if k > 0.0 && k < half {
            cuts.push(k);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let tol = 1e-10 * a_plus / cuts.len() as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += adaptive_simpson(f, w[0], w[1], tol)?;
    }
    Ok(total / a_plus)
}

/// `F(x + 1) / F(x)`; tends to one for long-tailed laws.
pub fn long_tail_ratio(model: &TailModel, x: f64) -> Result<f64> {
    let l0 = model.log_tail_bar(x);
    let l1 = model.log_tail_bar(x + 1.0);
    if !l0.is_finite() {
        return Err(Error::TailUnderflow { x });
    }
    Ok((l1 - l0).exp())
}
