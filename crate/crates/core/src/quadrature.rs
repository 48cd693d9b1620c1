//! Adaptive Simpson quadrature with Richardson correction, plus a
//! semi-infinite variant that walks out along doubling panels.

use crate::error::{Error, Result};

/// Evaluation budget shared by one call.
pub const DEFAULT_MAX_EVALS: usize = 2_000_000;
const MAX_DEPTH: u32 = 48;

struct Budget {
    evals: usize,
    max: usize,
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut Budget,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    if !(a < lm && lm < m && m < rm && rm < b) {
        // interval exhausted floating resolution
        return Some(whole);
    }
    let flm = f(lm);
    let frm = f(rm);
    budget.evals += 2;
    if budget.evals > budget.max {
        return None;
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    let l = refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget)?;
    let r = refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget)?;
    Some(l + r)
}

fn simpson_with_budget<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    budget: &mut Budget,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return simpson_with_budget(f, b, a, abs_tol, budget).map(|v| -v);
    }
    // a few initial panels so narrow features are not stepped over
    const PANELS: usize = 8;
    let width = (b - a) / PANELS as f64;
    let mut total = 0.0;
    for i in 0..PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == PANELS { b } else { lo + width };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        budget.evals += 3;
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        let part = refine(
            f,
            lo,
            hi,
            flo,
            fmid,
            fhi,
            whole,
            abs_tol / PANELS as f64,
            MAX_DEPTH,
            budget,
        )
        .ok_or(Error::QuadratureNotConverged {
            lo: a,
            hi: b,
            evaluations: budget.evals,
        })?;
        total += part;
    }
    Ok(total)
}

/// Integral of `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    let mut budget = Budget {
        evals: 0,
        max: DEFAULT_MAX_EVALS,
    };
    simpson_with_budget(&f, a, b, abs_tol, &mut budget)
}

/// Integral of a non-negative, eventually non-increasing `f` over `[a, inf)`.
///
/// Panels `[a, a+w], [a+w, a+3w], ...` double in width. The walk stops once
/// `f(end) < stop_level` and `end_distance * f(end)` together with the last
/// panel's contribution drop below `abs_tol`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    initial_width: f64,
    stop_level: f64,
    abs_tol: f64,
) -> Result<f64> {
    if !(initial_width > 0.0) {
        return Err(Error::param("initial_width", "must be positive"));
    }
    let mut budget = Budget {
        evals: 0,
        max: DEFAULT_MAX_EVALS,
    };
    let mut lo = a;
    let mut width = initial_width;
    let mut total = 0.0;
    for _ in 0..400 {
        let hi = lo + width;
        let part = simpson_with_budget(&f, lo, hi, abs_tol * 1e-2, &mut budget)?;
        total += part;
        let f_hi = f(hi);
        let reach = (hi - a).max(hi.abs()).max(1.0);
        if f_hi < stop_level && part.abs() < abs_tol && reach * f_hi < abs_tol {
            return Ok(total);
        }
        if !hi.is_finite() {
            break;
        }
        lo = hi;
        width *= 2.0;
    }
    Err(Error::QuadratureNotConverged {
        lo: a,
        hi: f64::INFINITY,
        evaluations: budget.evals,
    })
}
