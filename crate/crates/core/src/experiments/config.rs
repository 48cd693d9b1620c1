use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::asymptotics::ApproxForm;
use crate::error::{Error, Result};
use crate::processes::{Caps, ProcessKind, ProcessSpec};
use crate::random_times::TimeRule;

/// One experiment, read from a single JSON document.
///
/// The process is kept as a raw kind so that zero-drift models can be
/// simulated; the asymptotic forms check the drift themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub process: ProcessKind,
    pub rule: TimeRule,
    pub x_grid: Vec<f64>,
    pub n_reps: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub forms: Vec<ApproxForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Points where some form falls below `regime_guard * F(x)` are
    /// flagged in the comparison summary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime_guard: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn spec(&self) -> Result<ProcessSpec> {
        ProcessSpec::unchecked_drift(self.process)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_grid.is_empty() {
            return Err(Error::Config("x_grid is empty".into()));
        }
        if self.x_grid.iter().any(|x| !x.is_finite())
            || self.x_grid.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::Config(
                "x_grid must be finite and strictly increasing".into(),
            ));
        }
        if self.n_reps < 1 {
            return Err(Error::Config("n_reps must be at least 1".into()));
        }
        if self.caps.max_jumps < 1 {
            return Err(Error::Config("caps.max_jumps must be at least 1".into()));
        }
        if let Some(g) = self.regime_guard {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::Config(
                    "regime_guard must be finite and non-negative".into(),
                ));
            }
        }
        self.spec()?;
        self.rule.validate()?;
        Ok(())
    }
}
