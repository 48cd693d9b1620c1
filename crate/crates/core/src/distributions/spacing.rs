//! Laws of the inter-jump spacings `T_n - T_{n-1}`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum RawSpacing {
    Exponential { rate: f64 },
    Deterministic { period: f64 },
    Uniform { lo: f64, hi: f64 },
}

/// Strictly positive spacing law with a closed-form mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpacing", into = "RawSpacing")]
pub enum SpacingModel {
    Exponential { rate: f64 },
    Deterministic { period: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl TryFrom<RawSpacing> for SpacingModel {
    type Error = Error;
    fn try_from(raw: RawSpacing) -> Result<Self> {
        match raw {
            RawSpacing::Exponential { rate } => SpacingModel::exponential(rate),
            RawSpacing::Deterministic { period } => SpacingModel::deterministic(period),
            RawSpacing::Uniform { lo, hi } => SpacingModel::uniform(lo, hi),
        }
    }
}

impl From<SpacingModel> for RawSpacing {
    fn from(s: SpacingModel) -> Self {
        match s {
            SpacingModel::Exponential { rate } => RawSpacing::Exponential { rate },
            SpacingModel::Deterministic { period } => RawSpacing::Deterministic { period },
            SpacingModel::Uniform { lo, hi } => RawSpacing::Uniform { lo, hi },
        }
    }
}

impl SpacingModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::param("rate", "must be positive and finite"));
        }
        Ok(SpacingModel::Exponential { rate })
    }

    pub fn deterministic(period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::param("period", "must be positive and finite"));
        }
        Ok(SpacingModel::Deterministic { period })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::param("lo", "need 0 < lo < hi < inf"));
        }
        Ok(SpacingModel::Uniform { lo, hi })
    }

    /// `E T_1 = 1 / lambda`.
    pub fn mean(&self) -> f64 {
        match *self {
            SpacingModel::Exponential { rate } => 1.0 / rate,
            SpacingModel::Deterministic { period } => period,
            SpacingModel::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    /// `P{T_1 > t}`.
    pub fn tail_bar(&self, t: f64) -> f64 {
        match *self {
            SpacingModel::Exponential { rate } => {
                if t <= 0.0 {
                    1.0
                } else {
                    (-rate * t).exp()
                }
            }
            SpacingModel::Deterministic { period } => {
                if t < period {
                    1.0
                } else {
                    0.0
                }
            }
            SpacingModel::Uniform { lo, hi } => ((hi - t) / (hi - lo)).clamp(0.0, 1.0),
        }
    }

    /// Inverse transform of `u` in `(0, 1)`.
    pub fn sample_from_uniform(&self, u: f64) -> f64 {
        match *self {
            SpacingModel::Exponential { rate } => -u.ln() / rate,
            SpacingModel::Deterministic { period } => period,
            SpacingModel::Uniform { lo, hi } => lo + (hi - lo) * u,
        }
    }

    /// One strictly positive draw; consumes one `u64`, except Deterministic.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            SpacingModel::Deterministic { period } => period,
            _ => self.sample_from_uniform(rng::uniform_open(rng)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn means_and_positivity() {
        let specs = [
            SpacingModel::exponential(2.0).unwrap(),
            SpacingModel::deterministic(1.5).unwrap(),
            SpacingModel::uniform(0.5, 1.5).unwrap(),
        ];
        let mut r = rng::from_seed(11);
        for s in specs {
            let n = 200_000;
            let mut sum = 0.0;
            for _ in 0..n {
                let t = s.sample(&mut r);
                assert!(t > 0.0);
                sum += t;
            }
            let m = sum / n as f64;
            assert!((m - s.mean()).abs() < 0.01 * s.mean(), "{s:?}: {m}");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(SpacingModel::exponential(0.0).is_err());
        assert!(SpacingModel::deterministic(-1.0).is_err());
        assert!(SpacingModel::uniform(0.0, 1.0).is_err());
        assert!(SpacingModel::uniform(2.0, 1.0).is_err());
        assert!(serde_json::from_str::<SpacingModel>(r#"{"uniform":{"lo":0,"hi":1}}"#).is_err());
    }

    #[test]
    fn deterministic_tail() {
        let s = SpacingModel::deterministic(1.0).unwrap();
        assert_eq!(s.tail_bar(0.999), 1.0);
        assert_eq!(s.tail_bar(1.0), 0.0);
    }
}
