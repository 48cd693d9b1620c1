use serde::{Deserialize, Serialize};

use crate::distributions::{SpacingModel, TailModel};
use crate::error::{Error, Result};
use crate::processes::Segment;
use crate::rng::{self, StreamRole};

/// Law of an independent horizon; must live on `[0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum HorizonLaw {
    Tail(TailModel),
    Spacing(SpacingModel),
}

impl HorizonLaw {
    pub fn sample<R: rand::RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            HorizonLaw::Tail(m) => m.sample(rng),
            HorizonLaw::Spacing(s) => s.sample(rng),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            HorizonLaw::Tail(m) => m.mean(),
            HorizonLaw::Spacing(s) => s.mean(),
        }
    }
}

/// A random time whose event `{tau < T_n}` is decided from the path
/// strictly before `T_n` and the rule's own randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeRule {
    /// `tau = t`.
    FixedTime {
        t: f64,
    },
    /// `tau = T_n`, so that `N_tau = n`.
    FixedJumpCount {
        n: u64,
    },
    /// First time the path is at or below `level < 0`.
    FirstPassageBelow {
        level: f64,
    },
    /// First epoch `T_k`, `k >= 1`, with `Y_1 + ... + Y_k > threshold`.
    FirstExceedanceOfJumpSum {
        threshold: f64,
    },
    /// A horizon drawn once per replicate from its own stream.
    IndependentTime {
        law: HorizonLaw,
        stream: u32,
    },
    MinOf {
        a: Box<TimeRule>,
        b: Box<TimeRule>,
    },
}

impl TimeRule {
    pub fn fixed_time(t: f64) -> Self {
        TimeRule::FixedTime { t }
    }

    pub fn fixed_jump_count(n: u64) -> Self {
        TimeRule::FixedJumpCount { n }
    }

    pub fn first_passage_below(level: f64) -> Self {
        TimeRule::FirstPassageBelow { level }
    }

    pub fn first_exceedance(threshold: f64) -> Self {
        TimeRule::FirstExceedanceOfJumpSum { threshold }
    }

    pub fn independent(law: HorizonLaw, stream: u32) -> Self {
        TimeRule::IndependentTime { law, stream }
    }

    pub fn min_of(a: TimeRule, b: TimeRule) -> Self {
        TimeRule::MinOf {
            a: Box::new(a),
            b: Box::new(b),
        }
    }

    /// Parameter checks, plus the closure rule for minima: independent
    /// horizons inside one rule must use distinct streams.
    pub fn validate(&self) -> Result<()> {
        let mut streams = Vec::new();
        self.validate_into(&mut streams)
    }

    fn validate_into(&self, streams: &mut Vec<u32>) -> Result<()> {
        match self {
            TimeRule::FixedTime { t } => {
                if !(t.is_finite() && *t >= 0.0) {
                    return Err(Error::RuleRejected(format!(
                        "fixed time {t} must be finite and >= 0"
                    )));
                }
            }
            TimeRule::FixedJumpCount { n } => {
                if *n < 1 {
                    return Err(Error::RuleRejected("jump count must be at least 1".into()));
                }
            }
            TimeRule::FirstPassageBelow { level } => {
                if !(level.is_finite() && *level < 0.0) {
                    return Err(Error::RuleRejected(format!(
                        "passage level {level} must be negative"
                    )));
                }
            }
            TimeRule::FirstExceedanceOfJumpSum { threshold } => {
                if !threshold.is_finite() {
                    return Err(Error::RuleRejected("threshold must be finite".into()));
                }
            }
            TimeRule::IndependentTime { law, stream } => {
                if let HorizonLaw::Tail(m) = law {
                    if m.support_min() < 0.0 {
                        return Err(Error::RuleRejected(
                            "horizon law must live on [0, inf)".into(),
                        ));
                    }
                }
                if streams.contains(stream) {
                    return Err(Error::RuleRejected(format!(
                        "independent horizons share stream {stream}; their minimum would not be independent"
                    )));
                }
                streams.push(*stream);
            }
            TimeRule::MinOf { a, b } => {
                a.validate_into(streams)?;
                b.validate_into(streams)?;
            }
        }
        Ok(())
    }

    fn visit(&self, f: &mut impl FnMut(&TimeRule)) {
        match self {
            TimeRule::MinOf { a, b } => {
                a.visit(f);
                b.visit(f);
            }
            leaf => f(leaf),
        }
    }

    /// Upper bound on `tau` when the rule contains a fixed time.
    pub fn time_bound(&self) -> Option<f64> {
        let mut bound: Option<f64> = None;
        self.visit(&mut |r| {
            if let TimeRule::FixedTime { t } = r {
                bound = Some(bound.map_or(*t, |b| b.min(*t)));
            }
        });
        bound
    }
}

impl std::fmt::Display for TimeRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeRule::FixedTime { t } => write!(f, "fixed_time({t})"),
            TimeRule::FixedJumpCount { n } => write!(f, "fixed_jump_count({n})"),
            TimeRule::FirstPassageBelow { level } => write!(f, "first_passage_below({level})"),
            TimeRule::FirstExceedanceOfJumpSum { threshold } => {
                write!(f, "first_exceedance({threshold})")
            }
            TimeRule::IndependentTime { stream, .. } => {
                write!(f, "independent_time(stream {stream})")
            }
            TimeRule::MinOf { a, b } => write!(f, "min({a}; {b})"),
        }
    }
}

/// What the path has revealed before the candidate epoch `T_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prefix {
    /// Index of the candidate epoch.
    pub n: u64,
    /// `T_{n-1}` (zero for `n = 1`).
    pub t_prev: f64,
    /// `X_{T_{n-1}}`.
    pub x_prev: f64,
    /// `Y_1 + ... + Y_{n-1}`.
    pub jump_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decision {
    /// `tau` lies in `[T_{n-1}, T_n)`.
    TauBefore(f64),
    NotYet,
}

/// Per-replicate state of a rule. A minimum of rules is flattened into
/// one horizon, one jump count, one barrier and one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleState {
    horizon: f64,
    jump_count: Option<u64>,
    barrier: Option<f64>,
    threshold: Option<f64>,
}

impl RuleState {
    /// Draws independent horizons from `(master, replicate)` streams.
    pub fn start(rule: &TimeRule, master: u64, replicate: u64) -> Result<Self> {
        Self::start_with(rule, |stream, law| {
            let mut r = rng::stream(master, replicate, StreamRole::IndependentTime, stream);
            law.sample(&mut r)
        })
    }

    /// Independent horizons supplied by `draw(stream, law)`.
    pub fn start_with<F: FnMut(u32, &HorizonLaw) -> f64>(
        rule: &TimeRule,
        mut draw: F,
    ) -> Result<Self> {
        rule.validate()?;
        let mut st = RuleState {
            horizon: f64::INFINITY,
            jump_count: None,
            barrier: None,
            threshold: None,
        };
        rule.visit(&mut |r| match r {
            TimeRule::FixedTime { t } => st.horizon = st.horizon.min(*t),
            TimeRule::IndependentTime { law, stream } => {
                let h = draw(*stream, law).max(0.0);
                st.horizon = st.horizon.min(h);
            }
            TimeRule::FixedJumpCount { n } => {
                st.jump_count = Some(st.jump_count.map_or(*n, |k| k.min(*n)));
            }
            TimeRule::FirstPassageBelow { level } => {
                st.barrier = Some(st.barrier.map_or(*level, |l| l.max(*level)));
            }
            TimeRule::FirstExceedanceOfJumpSum { threshold } => {
                st.threshold = Some(st.threshold.map_or(*threshold, |h| h.min(*threshold)));
            }
            TimeRule::MinOf { .. } => unreachable!(),
        });
        Ok(st)
    }

    /// Deterministic part of the horizon (infinite when absent).
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Decides `I{tau < T_n}` from the prefix and the segment up to `T_n - 0`.
    /// Ties at epochs resolve to `tau = T_n`, which belongs to `{tau >= T_n}`.
    pub fn decide(&mut self, prefix: &Prefix, seg: &mut Segment) -> Result<Decision> {
        let (t0, t1) = (seg.t0(), seg.t1());
        if !(t1 > t0) || t0 != prefix.t_prev || prefix.n == 0 {
            return Err(Error::InvalidPrefix(format!(
                "epoch {} at {t1} does not follow {}",
                prefix.n, prefix.t_prev
            )));
        }
        let revealed = prefix.n - 1;
        if self.jump_count.is_some_and(|k| revealed >= k)
            || self
                .threshold
                .is_some_and(|h| revealed >= 1 && prefix.jump_sum > h)
            || self.barrier.is_some_and(|l| prefix.x_prev <= l)
            || self.horizon <= t0
        {
            return Ok(Decision::TauBefore(t0));
        }
        let until = self.horizon.min(t1);
        if let Some(level) = self.barrier {
            if let Some(theta) = seg.first_passage_below(level, until) {
                return Ok(Decision::TauBefore(theta));
            }
        }
        if self.horizon < t1 {
            return Ok(Decision::TauBefore(self.horizon));
        }
        Ok(Decision::NotYet)
    }
}
