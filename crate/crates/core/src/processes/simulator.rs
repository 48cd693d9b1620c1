//! Event-driven simulation on the jump skeleton.
//!
//! Each epoch is handled in two phases. [`PathState::open_segment`] draws
//! the spacing (and, for a Brownian part, the left limit at `T_n` and a
//! seed for the segment's interior). The time rule then decides whether
//! `tau < T_n`. Only afterwards does [`PathState::close_segment`] draw the
//! jump `Y_n`, so no decision can see it.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::segment::{BrownianSegment, LinearSegment, Segment};
use super::spec::{ProcessKind, ProcessSpec};
use crate::distributions::SpacingModel;
use crate::error::{Error, Result};
use crate::random_times::{Decision, Prefix, RuleState, TimeRule};
use crate::rng::{self, StreamRole};

/// Default per-replicate jump budget.
pub const DEFAULT_MAX_JUMPS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    #[serde(default = "default_max_jumps")]
    pub max_jumps: u64,
    /// Absent means unbounded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_time: Option<f64>,
}

fn default_max_jumps() -> u64 {
    DEFAULT_MAX_JUMPS
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_jumps: DEFAULT_MAX_JUMPS,
            max_time: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Sample exact Brownian maxima. When off, `m_tau` for a Brownian
    /// part is only the maximum over the skeleton values.
    pub track_max: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { track_max: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEvent {
    pub n: u64,
    pub t_n: f64,
    /// `X_{T_n - 0}`.
    pub x_pre: f64,
    /// `X_{T_n}`.
    pub x_post: f64,
    /// `sup X` over `[T_{n-1}, T_n)`.
    pub seg_max: f64,
}

/// One realization `(tau, N_tau, M_tau, X_tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxSample {
    pub tau: f64,
    pub n_tau: u64,
    pub m_tau: f64,
    pub x_tau: f64,
    /// Seed of the path stream (zero when driven by a caller's stream).
    pub seed: u64,
}

/// Skeleton state after `n` jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    pub n: u64,
    pub t: f64,
    pub x: f64,
    pub jump_sum: f64,
    /// Running maximum over `[0, T_n]`.
    pub max: f64,
}

impl Default for PathState {
    fn default() -> Self {
        PathState {
            n: 0,
            t: 0.0,
            x: 0.0,
            jump_sum: 0.0,
            max: 0.0,
        }
    }
}

impl PathState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn prefix(&self) -> Prefix {
        Prefix {
            n: self.n + 1,
            t_prev: self.t,
            x_prev: self.x,
            jump_sum: self.jump_sum,
        }
    }

    /// Draws everything about `[T_n, T_{n+1})` except the jump at its end.
    pub fn open_segment<R: RngCore + ?Sized>(&self, spec: &ProcessSpec, rng: &mut R) -> Segment {
        let (t0, x0) = (self.t, self.x);
        let linear = |dt: f64, slope: f64| {
            Segment::Linear(LinearSegment {
                t0,
                t1: t0 + dt,
                x0,
                slope,
            })
        };
        match *spec.kind() {
            ProcessKind::RandomWalk { .. } => linear(1.0, 0.0),
            ProcessKind::CompoundRenewal { c, spacing, .. } => linear(spacing.sample(rng), c),
            ProcessKind::CompoundPoisson { c, rate, .. } => {
                linear(SpacingModel::Exponential { rate }.sample(rng), c)
            }
            ProcessKind::Levy {
                drift,
                sigma,
                big_jump_rate,
                ..
            } => {
                let dt = SpacingModel::Exponential {
                    rate: big_jump_rate,
                }
                .sample(rng);
                if sigma == 0.0 {
                    return linear(dt, drift);
                }
                let z = rng::standard_normal(rng);
                let seed = rng.next_u64();
                let x1 = x0 + drift * dt + sigma * dt.sqrt() * z;
                Segment::Brownian(Box::new(BrownianSegment::new(
                    t0,
                    t0 + dt,
                    x0,
                    x1,
                    sigma,
                    seed,
                )))
            }
        }
    }

    /// Draws the jump at the segment's right end and advances the state.
    pub fn close_segment<R: RngCore + ?Sized>(
        &mut self,
        spec: &ProcessSpec,
        mut seg: Segment,
        rng: &mut R,
        opts: RunOptions,
    ) -> PathEvent {
        let t1 = seg.t1();
        let x_pre = seg.x_end();
        let seg_max = seg.max_until(t1, opts.track_max);
        let y = spec.jump().sample(rng);
        let x_post = x_pre + y;
        self.n += 1;
        self.t = t1;
        self.x = x_post;
        self.jump_sum += y;
        self.max = self.max.max(seg_max).max(x_post);
        PathEvent {
            n: self.n,
            t_n: t1,
            x_pre,
            x_post,
            seg_max,
        }
    }

    /// One full epoch with no rule attached.
    pub fn next_event<R: RngCore + ?Sized>(
        &mut self,
        spec: &ProcessSpec,
        rng: &mut R,
    ) -> PathEvent {
        let seg = self.open_segment(spec, rng);
        self.close_segment(spec, seg, rng, RunOptions::default())
    }
}

/// Streams the path through `rule` until `tau` is realized.
pub fn run_until<R: RngCore + ?Sized>(
    spec: &ProcessSpec,
    rule: &mut RuleState,
    rng: &mut R,
    caps: &Caps,
    opts: RunOptions,
) -> Result<MaxSample> {
    let mut st = PathState::new();
    let max_time = caps.max_time.unwrap_or(f64::INFINITY);
    loop {
        if st.n >= caps.max_jumps || st.t > max_time {
            return Err(Error::CapExceeded {
                jumps: st.n,
                time: st.t,
            });
        }
        let mut seg = st.open_segment(spec, rng);
        match rule.decide(&st.prefix(), &mut seg)? {
            Decision::TauBefore(tau) => {
                let x_tau = seg.value_at(tau);
                let m_tau = st.max.max(seg.max_until(tau, opts.track_max));
                return Ok(MaxSample {
                    tau,
                    n_tau: st.n,
                    m_tau,
                    x_tau,
                    seed: 0,
                });
            }
            Decision::NotYet => {
                st.close_segment(spec, seg, rng, opts);
            }
        }
    }
}

/// Replicate `index` of a run keyed by `master`: path and horizon
/// randomness come from separate streams.
pub fn simulate_replicate(
    spec: &ProcessSpec,
    rule: &TimeRule,
    master: u64,
    index: u64,
    caps: &Caps,
    opts: RunOptions,
) -> Result<MaxSample> {
    let mut state = RuleState::start(rule, master, index)?;
    let seed = rng::stream_seed(master, index, StreamRole::Path, 0);
    let mut path = rng::from_seed(seed);
    let mut s = run_until(spec, &mut state, &mut path, caps, opts)?;
    s.seed = seed;
    Ok(s)
}

/// Replicates `0..n_reps` in index order. Replicates that hit a cap are
/// returned as `None`; any other error aborts the batch.
pub fn simulate_many(
    spec: &ProcessSpec,
    rule: &TimeRule,
    master: u64,
    n_reps: u64,
    caps: &Caps,
    opts: RunOptions,
    workers: Option<usize>,
) -> Result<Vec<Option<MaxSample>>> {
    let parts = crate::parallel::map_chunks(n_reps, workers, |start, end| {
        (start..end)
            .map(
                |i| match simulate_replicate(spec, rule, master, i, caps, opts) {
                    Ok(s) => Ok(Some(s)),
                    Err(Error::CapExceeded { .. }) => Ok(None),
                    Err(e) => Err(e),
                },
            )
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(parts.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::TailModel;

    fn walk(jump: TailModel) -> ProcessSpec {
        ProcessSpec::unchecked_drift(ProcessKind::RandomWalk { jump }).unwrap()
    }

    fn run(spec: &ProcessSpec, rule: TimeRule, seed: u64) -> MaxSample {
        simulate_replicate(
            spec,
            &rule,
            seed,
            0,
            &Caps::default(),
            RunOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn deterministic_walk_event() {
        let spec = walk(TailModel::degenerate(-1.0).unwrap());
        let mut st = PathState::new();
        let mut r = rng::from_seed(0);
        let e = st.next_event(&spec, &mut r);
        assert_eq!(
            e,
            PathEvent {
                n: 1,
                t_n: 1.0,
                x_pre: 0.0,
                x_post: -1.0,
                seg_max: 0.0
            }
        );
    }

    #[test]
    fn renewal_linear_descent_then_jump() {
        let spec = ProcessSpec::compound_renewal(
            -1.0,
            SpacingModel::deterministic(1.0).unwrap(),
            TailModel::degenerate(0.5).unwrap(),
        )
        .unwrap();
        let mut st = PathState::new();
        let e = st.next_event(&spec, &mut rng::from_seed(0));
        assert_eq!(
            (e.n, e.t_n, e.x_pre, e.x_post, e.seg_max),
            (1, 1.0, -1.0, -0.5, 0.0)
        );
    }

    #[test]
    fn fixed_count_and_fixed_time_samples() {
        let spec = walk(TailModel::degenerate(-1.0).unwrap());
        let s = run(&spec, TimeRule::fixed_jump_count(5), 1);
        assert_eq!((s.tau, s.n_tau, s.m_tau, s.x_tau), (5.0, 5, 0.0, -5.0));
        let s = run(&spec, TimeRule::first_passage_below(-5.0), 1);
        assert_eq!((s.tau, s.n_tau, s.x_tau), (5.0, 5, -5.0));

        let cr = ProcessSpec::compound_renewal(
            -1.0,
            SpacingModel::deterministic(1.0).unwrap(),
            TailModel::degenerate(0.5).unwrap(),
        )
        .unwrap();
        let s = run(&cr, TimeRule::fixed_time(2.5), 1);
        // -1 + 0.5 - 1 + 0.5 - 0.5
        assert_eq!((s.tau, s.n_tau, s.m_tau), (2.5, 2, 0.0));
        assert!((s.x_tau + 1.5).abs() < 1e-15);
    }

    #[test]
    fn fixed_time_zero() {
        let spec = walk(TailModel::degenerate(-1.0).unwrap());
        let s = run(&spec, TimeRule::fixed_time(0.0), 3);
        assert_eq!((s.tau, s.n_tau, s.m_tau, s.x_tau), (0.0, 0, 0.0, 0.0));
    }

    #[test]
    fn cap_is_reported() {
        let spec = walk(TailModel::degenerate(-1.0).unwrap());
        let caps = Caps {
            max_jumps: 10,
            max_time: None,
        };
        let r = simulate_replicate(
            &spec,
            &TimeRule::fixed_jump_count(20),
            0,
            0,
            &caps,
            RunOptions::default(),
        );
        assert!(matches!(r, Err(Error::CapExceeded { jumps: 10, .. })));
    }

    #[test]
    fn reruns_are_identical() {
        let jump = TailModel::pareto(2.0, 1.0)
            .unwrap()
            .with_shift(2.0)
            .unwrap();
        // zero drift: admitted for simulation only
        let spec = ProcessSpec::unchecked_drift(ProcessKind::CompoundPoisson {
            c: 0.0,
            rate: 1.0,
            jump,
        })
        .unwrap();
        let events = |seed| {
            let mut st = PathState::new();
            let mut r = rng::from_seed(seed);
            (0..50)
                .map(|_| st.next_event(&spec, &mut r))
                .collect::<Vec<_>>()
        };
        let (a, b) = (events(42), events(42));
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[1].t_n > w[0].t_n));
    }

    #[test]
    fn segment_max_rules() {
        let jump = TailModel::pareto(2.0, 1.0)
            .unwrap()
            .with_shift(4.0)
            .unwrap();
        for c in [-1.0, 1.0] {
            let spec = ProcessSpec::compound_poisson(c, 1.0, jump).unwrap();
            let mut st = PathState::new();
            let mut r = rng::from_seed(5);
            let mut prev = 0.0;
            for _ in 0..200 {
                let e = st.next_event(&spec, &mut r);
                let want = if c > 0.0 { e.x_pre } else { prev };
                assert_eq!(e.seg_max, want);
                prev = e.x_post;
            }
        }
        let lv = ProcessSpec::levy(-4.0, 1.0, 1.0, TailModel::pareto(2.0, 1.0).unwrap()).unwrap();
        let mut st = PathState::new();
        let mut r = rng::from_seed(5);
        let mut prev = 0.0;
        for _ in 0..200 {
            let e = st.next_event(&lv, &mut r);
            assert!(e.seg_max >= e.x_pre.max(prev));
            prev = e.x_post;
        }
    }

    #[test]
    fn levy_without_brownian_part_matches_compound_poisson() {
        let jump = TailModel::pareto(2.0, 1.0).unwrap();
        let cp = ProcessSpec::compound_poisson(-3.0, 1.0, jump).unwrap();
        let lv = ProcessSpec::levy(-3.0, 0.0, 1.0, jump).unwrap();
        let rule = TimeRule::fixed_time(25.0);
        for seed in 0..50 {
            assert_eq!(run(&cp, rule.clone(), seed), run(&lv, rule.clone(), seed));
        }
    }

    #[test]
    fn maximum_dominates() {
        let jump = TailModel::lognormal(0.0, 1.0)
            .unwrap()
            .with_shift(-1.0)
            .unwrap();
        let lv = ProcessSpec::levy(-4.0, 1.5, 1.0, jump).unwrap();
        for seed in 0..300 {
            let s = run(&lv, TimeRule::fixed_time(7.3), seed);
            assert!(s.m_tau >= s.x_tau && s.m_tau >= 0.0);
            let s = run(
                &lv,
                TimeRule::min_of(
                    TimeRule::first_passage_below(-2.0),
                    TimeRule::fixed_time(9.0),
                ),
                seed,
            );
            assert!(s.m_tau >= s.x_tau && s.m_tau >= 0.0);
            assert!(s.tau <= 9.0);
            if s.tau < 9.0 {
                assert_eq!(s.x_tau, -2.0);
            }
        }
    }
}
