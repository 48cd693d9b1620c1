use serde::{Deserialize, Serialize};

use crate::distributions::{Family, SpacingModel, TailModel};
use crate::error::{Error, Result};

/// The four process classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessKind {
    /// `S_n = Y_1 + ... + Y_n` with epochs `T_n = n`.
    RandomWalk { jump: TailModel },
    /// `X_t = sum_{i <= N_t} Y_i + c t` with renewal epochs.
    CompoundRenewal {
        c: f64,
        spacing: SpacingModel,
        jump: TailModel,
    },
    /// Compound renewal with exponential spacings of rate `rate`.
    CompoundPoisson { c: f64, rate: f64, jump: TailModel },
    /// `drift t + sigma B_t` plus compound Poisson jumps of size at least one.
    Levy {
        drift: f64,
        sigma: f64,
        big_jump_rate: f64,
        big_jump: TailModel,
    },
}

/// A validated process description with negative drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProcessKind", into = "ProcessKind")]
pub struct ProcessSpec {
    kind: ProcessKind,
}

impl TryFrom<ProcessKind> for ProcessSpec {
    type Error = Error;
    fn try_from(kind: ProcessKind) -> Result<Self> {
        ProcessSpec::new(kind)
    }
}

impl From<ProcessSpec> for ProcessKind {
    fn from(s: ProcessSpec) -> Self {
        s.kind
    }
}

/// Largest x used by the `c T_1 > x` admissibility scan.
const ADMISSIBILITY_GRID: [f64; 5] = [1e2, 1e3, 1e4, 1e5, 1e6];

impl ProcessSpec {
    /// Validates parameters, the support of Levy big jumps, the spacing
    /// tail condition and negative drift.
    pub fn new(kind: ProcessKind) -> Result<Self> {
        let spec = Self::unchecked_drift(kind)?;
        let mean = spec.mean_increment_per_jump();
        if !(mean < 0.0) {
            return Err(Error::NonNegativeDrift { mean });
        }
        Ok(spec)
    }

    /// Like [`ProcessSpec::new`] but admits zero or positive drift. For
    /// simulation only; the asymptotic evaluators refuse such specs.
    pub fn unchecked_drift(kind: ProcessKind) -> Result<Self> {
        match kind {
            ProcessKind::RandomWalk { .. } => {}
            ProcessKind::CompoundRenewal { c, spacing, jump } => {
                finite("c", c)?;
                check_spacing_tail(c, &spacing, &jump)?;
            }
            ProcessKind::CompoundPoisson { c, rate, .. } => {
                finite("c", c)?;
                positive("rate", rate)?;
            }
            ProcessKind::Levy {
                drift,
                sigma,
                big_jump_rate,
                big_jump,
            } => {
                finite("drift", drift)?;
                finite("sigma", sigma)?;
                if sigma < 0.0 {
                    return Err(Error::param("sigma", "must be non-negative"));
                }
                positive("big_jump_rate", big_jump_rate)?;
                check_big_jump_support(&big_jump)?;
            }
        }
        Ok(ProcessSpec { kind })
    }

    pub fn random_walk(jump: TailModel) -> Result<Self> {
        Self::new(ProcessKind::RandomWalk { jump })
    }

    pub fn compound_renewal(c: f64, spacing: SpacingModel, jump: TailModel) -> Result<Self> {
        Self::new(ProcessKind::CompoundRenewal { c, spacing, jump })
    }

    pub fn compound_poisson(c: f64, rate: f64, jump: TailModel) -> Result<Self> {
        Self::new(ProcessKind::CompoundPoisson { c, rate, jump })
    }

    pub fn levy(drift: f64, sigma: f64, big_jump_rate: f64, big_jump: TailModel) -> Result<Self> {
        Self::new(ProcessKind::Levy {
            drift,
            sigma,
            big_jump_rate,
            big_jump,
        })
    }

    pub fn kind(&self) -> &ProcessKind {
        &self.kind
    }

    pub fn jump(&self) -> &TailModel {
        match &self.kind {
            ProcessKind::RandomWalk { jump }
            | ProcessKind::CompoundRenewal { jump, .. }
            | ProcessKind::CompoundPoisson { jump, .. } => jump,
            ProcessKind::Levy { big_jump, .. } => big_jump,
        }
    }

    /// Linear drift between jumps (`c`, or the Levy drift).
    pub fn slope(&self) -> f64 {
        match self.kind {
            ProcessKind::RandomWalk { .. } => 0.0,
            ProcessKind::CompoundRenewal { c, .. } | ProcessKind::CompoundPoisson { c, .. } => c,
            ProcessKind::Levy { drift, .. } => drift,
        }
    }

    pub fn sigma(&self) -> f64 {
        match self.kind {
            ProcessKind::Levy { sigma, .. } => sigma,
            _ => 0.0,
        }
    }

    /// `E T_1`.
    pub fn mean_spacing(&self) -> f64 {
        match self.kind {
            ProcessKind::RandomWalk { .. } => 1.0,
            ProcessKind::CompoundRenewal { spacing, .. } => spacing.mean(),
            ProcessKind::CompoundPoisson { rate, .. } => 1.0 / rate,
            ProcessKind::Levy { big_jump_rate, .. } => 1.0 / big_jump_rate,
        }
    }

    /// Jump intensity `lambda = 1 / E T_1`.
    pub fn rate(&self) -> f64 {
        match self.kind {
            ProcessKind::CompoundPoisson { rate, .. } => rate,
            ProcessKind::Levy { big_jump_rate, .. } => big_jump_rate,
            _ => 1.0 / self.mean_spacing(),
        }
    }

    /// `E(c T_1 + Y_1)`, the signed mean increment over one spacing.
    pub fn mean_increment_per_jump(&self) -> f64 {
        match self.kind {
            ProcessKind::CompoundPoisson { .. } | ProcessKind::Levy { .. } => {
                self.mean_x1() / self.rate()
            }
            _ => self.slope() * self.mean_spacing() + self.jump().mean(),
        }
    }

    /// Signed `E X_1` per unit time.
    pub fn mean_x1(&self) -> f64 {
        match self.kind {
            ProcessKind::CompoundPoisson { c, rate, jump } => c + rate * jump.mean(),
            ProcessKind::Levy {
                drift,
                big_jump_rate,
                big_jump,
                ..
            } => drift + big_jump_rate * big_jump.mean(),
            _ => self.mean_increment_per_jump() / self.mean_spacing(),
        }
    }

    /// Per-jump drift magnitude `a = -E(c T_1 + Y_1)`.
    pub fn a(&self) -> f64 {
        -self.mean_increment_per_jump()
    }

    /// Per-unit-time drift magnitude `m = -E X_1`.
    pub fn m(&self) -> f64 {
        -self.mean_x1()
    }

    /// `Var X_1` for the Levy-type kinds (`sigma^2 + lambda E Y^2`), and
    /// `Var Y` for a random walk. `None` for renewal spacings.
    pub fn var_x1(&self) -> Option<f64> {
        match self.kind {
            ProcessKind::RandomWalk { jump } => Some(jump.variance()),
            ProcessKind::CompoundRenewal { .. } => None,
            ProcessKind::CompoundPoisson { rate, jump, .. } => Some(rate * jump.second_moment()),
            ProcessKind::Levy {
                sigma,
                big_jump_rate,
                big_jump,
                ..
            } => Some(sigma * sigma + big_jump_rate * big_jump.second_moment()),
        }
    }

    /// True when `X` is a Levy process (continuous-time, stationary increments).
    pub fn is_levy_type(&self) -> bool {
        matches!(
            self.kind,
            ProcessKind::CompoundPoisson { .. } | ProcessKind::Levy { .. }
        )
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, "must be finite"))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, "must be positive and finite"))
    }
}

/// `P{c T_1 > x} / P{Y > x}` on the admissibility grid.
pub fn spacing_tail_ratios(c: f64, spacing: &SpacingModel, jump: &TailModel) -> Vec<f64> {
    ADMISSIBILITY_GRID
        .iter()
        .map(|&x| {
            let num = spacing.tail_bar(x / c);
            let den = jump.tail_bar(x);
            if num == 0.0 {
                0.0
            } else if den == 0.0 {
                f64::INFINITY
            } else {
                num / den
            }
        })
        .collect()
}

/// For `c > 0` with a spacing law outside the exponential and
/// deterministic cases, `c T_1` must have a lighter tail than the jumps.
fn check_spacing_tail(c: f64, spacing: &SpacingModel, jump: &TailModel) -> Result<()> {
    if c <= 0.0 || !matches!(spacing, SpacingModel::Uniform { .. }) {
        return Ok(());
    }
    let r = spacing_tail_ratios(c, spacing, jump);
    let decreasing = r.windows(2).all(|w| w[1] <= w[0]);
    let last = *r.last().unwrap_or(&0.0);
    if decreasing && last < 1e-6 {
        Ok(())
    } else {
        Err(Error::Inadmissible(format!(
            "P{{cT_1 > x}} / P{{Y > x}} does not decrease to zero: {r:?}"
        )))
    }
}

/// Big jumps must put no mass in (-1, 1).
fn check_big_jump_support(jump: &TailModel) -> Result<()> {
    let s = jump.shift();
    let ok = match jump.family() {
        Family::TwoPoint { p, up, down } => {
            let atoms = [(p, up - s), (1.0 - p, down - s)];
            atoms.iter().all(|&(w, v)| w == 0.0 || v.abs() >= 1.0)
        }
        Family::Degenerate { v } => (v - s).abs() >= 1.0,
        _ => jump.support_min() >= 1.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Inadmissible(
            "big-jump law must be concentrated outside (-1, 1)".into(),
        ))
    }
}
