#![allow(dead_code)]

use htm::distributions::{SpacingModel, TailModel};
use htm::processes::{run_until, Caps, MaxSample, PathState, ProcessKind, ProcessSpec, RunOptions};
use htm::random_times::{Decision, HorizonLaw, RuleState, TimeRule};
use htm::rng;
use rand::RngCore;

/// Replays a fixed list of `u64` draws; panics when exhausted.
pub struct ScriptedRng {
    draws: Vec<u64>,
    pos: usize,
}

impl ScriptedRng {
    pub fn new(draws: Vec<u64>) -> Self {
        ScriptedRng { draws, pos: 0 }
    }

    pub fn used(&self) -> usize {
        self.pos
    }
}

impl RngCore for ScriptedRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let v = *self.draws.get(self.pos).expect("scripted draws exhausted");
        self.pos += 1;
        v
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let b = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&b[..chunk.len()]);
        }
    }
}

/// Draws from `a` until `switch_at` values were consumed, then from `b`.
pub struct SpliceRng<A, B> {
    pub a: A,
    pub b: B,
    pub switch_at: usize,
    pub used: usize,
}

impl<A: RngCore, B: RngCore> RngCore for SpliceRng<A, B> {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.used += 1;
        if self.used <= self.switch_at {
            self.a.next_u64()
        } else {
            self.b.next_u64()
        }
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let b = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&b[..chunk.len()]);
        }
    }
}

/// Counts `u64` draws taken from the inner generator.
pub struct Counting<R> {
    pub inner: R,
    pub used: usize,
}

impl<R: RngCore> RngCore for Counting<R> {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.used += 1;
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let b = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&b[..chunk.len()]);
        }
    }
}

pub fn two_point_walk() -> ProcessSpec {
    ProcessSpec::unchecked_drift(ProcessKind::RandomWalk {
        jump: TailModel::two_point(0.5, 1.0, -1.0).unwrap(),
    })
    .unwrap()
}

/// Uniform draw that maps to an up step (`u < 1/2`) or a down step.
pub fn step_draw(up: bool) -> u64 {
    if up {
        0
    } else {
        u64::MAX
    }
}

/// Horizon laws used in the enumeration: `Y = 8` or `Y = 3` with equal odds.
pub fn two_point_horizon() -> HorizonLaw {
    HorizonLaw::Tail(TailModel::two_point(0.5, 8.0, 3.0).unwrap())
}

/// Rules on the +-1 walk whose horizon never exceeds 12 jumps.
pub fn bounded_rules() -> Vec<TimeRule> {
    let cap = || TimeRule::fixed_jump_count(12);
    vec![
        TimeRule::fixed_jump_count(1),
        TimeRule::fixed_jump_count(7),
        TimeRule::fixed_jump_count(12),
        TimeRule::fixed_time(0.0),
        TimeRule::fixed_time(5.0),
        TimeRule::fixed_time(9.5),
        TimeRule::fixed_time(12.0),
        TimeRule::min_of(TimeRule::first_passage_below(-1.0), cap()),
        TimeRule::min_of(TimeRule::first_passage_below(-3.0), cap()),
        TimeRule::min_of(TimeRule::first_exceedance(1.5), cap()),
        TimeRule::min_of(TimeRule::first_exceedance(-0.5), cap()),
        TimeRule::independent(two_point_horizon(), 0),
        TimeRule::min_of(
            TimeRule::independent(two_point_horizon(), 0),
            TimeRule::first_passage_below(-2.0),
        ),
        TimeRule::min_of(
            TimeRule::min_of(
                TimeRule::first_exceedance(2.5),
                TimeRule::first_passage_below(-2.0),
            ),
            TimeRule::fixed_time(10.0),
        ),
    ]
}

/// Realized `(tau, N_tau, M_tau)` on a +-1 walk from first principles,
/// given the independent horizon value `h` (infinite when absent).
pub fn realize(rule: &TimeRule, steps: &[i32], h: f64) -> (f64, u64, i32) {
    let s: Vec<i32> = std::iter::once(0)
        .chain(steps.iter().scan(0, |acc, d| {
            *acc += d;
            Some(*acc)
        }))
        .collect();
    let tau = first_time(rule, &s, h);
    let n = tau.floor() as usize;
    let m = *s[..=n].iter().max().unwrap();
    (tau, n as u64, m)
}

fn first_time(rule: &TimeRule, s: &[i32], h: f64) -> f64 {
    let epochs = s.len() - 1;
    let first = |pred: &dyn Fn(usize) -> bool| {
        (1..=epochs)
            .find(|&k| pred(k))
            .map_or(f64::INFINITY, |k| k as f64)
    };
    match rule {
        TimeRule::FixedTime { t } => *t,
        TimeRule::FixedJumpCount { n } => *n as f64,
        TimeRule::FirstPassageBelow { level } => first(&|k| s[k] as f64 <= *level),
        TimeRule::FirstExceedanceOfJumpSum { threshold } => first(&|k| s[k] as f64 > *threshold),
        TimeRule::IndependentTime { .. } => h,
        TimeRule::MinOf { a, b } => first_time(a, s, h).min(first_time(b, s, h)),
    }
}

pub fn has_independent(rule: &TimeRule) -> bool {
    match rule {
        TimeRule::IndependentTime { .. } => true,
        TimeRule::MinOf { a, b } => has_independent(a) || has_independent(b),
        _ => false,
    }
}

/// `(probability, steps, h, (tau, n, m))`.
pub type WeightedPath = (f64, Vec<i32>, f64, (f64, u64, i32));

/// Exact law of `M_tau` over all `2^12` step sequences (and both horizon values).
pub fn enumerate(rule: &TimeRule) -> Vec<WeightedPath> {
    let hs: Vec<(f64, f64)> = if has_independent(rule) {
        vec![(8.0, 0.5), (3.0, 0.5)]
    } else {
        vec![(f64::INFINITY, 1.0)]
    };
    let mut out = Vec::new();
    for bits in 0u32..(1 << 12) {
        let steps: Vec<i32> = (0..12)
            .map(|i| if bits >> i & 1 == 1 { 1 } else { -1 })
            .collect();
        for &(h, w) in &hs {
            let r = realize(rule, &steps, h);
            out.push((w / 4096.0, steps.clone(), h, r));
        }
    }
    out
}

/// Drives the simulator with the given steps and horizon value.
pub fn replay(rule: &TimeRule, steps: &[i32], h: f64) -> MaxSample {
    let spec = two_point_walk();
    let mut state = RuleState::start_with(rule, |_, _| h).unwrap();
    let mut r = ScriptedRng::new(steps.iter().map(|&d| step_draw(d > 0)).collect());
    run_until(
        &spec,
        &mut state,
        &mut r,
        &Caps::default(),
        RunOptions::default(),
    )
    .unwrap()
}

/// Processes used by the splice and Wald suites.
pub fn process_zoo() -> Vec<(&'static str, ProcessSpec)> {
    let ln = TailModel::lognormal(0.0, 0.5).unwrap();
    vec![
        (
            "random_walk",
            ProcessSpec::random_walk(ln.with_shift(2.0).unwrap()).unwrap(),
        ),
        (
            "compound_renewal",
            ProcessSpec::compound_renewal(
                0.5,
                SpacingModel::uniform(0.5, 1.5).unwrap(),
                ln.with_shift(2.0).unwrap(),
            )
            .unwrap(),
        ),
        (
            "compound_poisson",
            ProcessSpec::compound_poisson(0.0, 1.0, ln.with_shift(2.0).unwrap()).unwrap(),
        ),
        (
            "levy",
            ProcessSpec::levy(-3.0, 1.0, 1.0, ln.with_shift(-1.0).unwrap()).unwrap(),
        ),
    ]
}

/// The five rule shapes of the Wald matrix.
pub fn wald_rules() -> Vec<(&'static str, TimeRule)> {
    let indep = || {
        TimeRule::independent(
            HorizonLaw::Spacing(SpacingModel::exponential(0.2).unwrap()),
            0,
        )
    };
    vec![
        ("fixed_time", TimeRule::fixed_time(5.0)),
        ("fixed_jump_count", TimeRule::fixed_jump_count(5)),
        ("first_passage_below", TimeRule::first_passage_below(-3.0)),
        ("independent_time", indep()),
        (
            "min_of",
            TimeRule::min_of(TimeRule::first_passage_below(-3.0), indep()),
        ),
    ]
}

/// Every rule shape, for the splice suite.
pub fn splice_rules() -> Vec<TimeRule> {
    let mut r: Vec<TimeRule> = wald_rules().into_iter().map(|(_, r)| r).collect();
    r.push(TimeRule::first_exceedance(2.0));
    r.push(TimeRule::min_of(
        TimeRule::first_exceedance(1.0),
        TimeRule::fixed_time(6.0),
    ));
    r
}

/// Per-epoch decisions and prefix values of one path, plus the number of
/// draws consumed before each jump.
pub struct Trace {
    pub decisions: Vec<(Decision, f64, f64)>,
    pub draws_before_jump: Vec<usize>,
}

pub fn trace<R: RngCore>(
    spec: &ProcessSpec,
    rule: &TimeRule,
    h_seed: u64,
    rng: &mut Counting<R>,
    max_epochs: usize,
) -> Trace {
    let mut state = RuleState::start(rule, h_seed, 0).unwrap();
    let mut st = PathState::new();
    let mut t = Trace {
        decisions: Vec::new(),
        draws_before_jump: Vec::new(),
    };
    for _ in 0..max_epochs {
        let mut seg = st.open_segment(spec, rng);
        let d = state.decide(&st.prefix(), &mut seg).unwrap();
        t.decisions.push((d, st.x, seg.x_end()));
        if let Decision::TauBefore(_) = d {
            break;
        }
        t.draws_before_jump.push(rng.used);
        st.close_segment(spec, seg, rng, RunOptions::default());
    }
    t
}

/// Runs `trials` splices: a path is cut just before a random jump and the
/// future is redrawn from an unrelated stream. Returns the number of trials
/// whose decisions up to the cut differ.
pub fn splice_mismatches(spec: &ProcessSpec, rule: &TimeRule, trials: u64, seed: u64) -> u64 {
    let mut bad = 0;
    for i in 0..trials {
        let path_seed = rng::stream_seed(seed, i, rng::StreamRole::Path, 0);
        let other_seed = rng::stream_seed(seed, i, rng::StreamRole::Auxiliary, 9);
        let h_seed = seed ^ i;
        let base = trace(
            spec,
            rule,
            h_seed,
            &mut Counting {
                inner: rng::from_seed(path_seed),
                used: 0,
            },
            64,
        );
        if base.draws_before_jump.is_empty() {
            continue;
        }
        let cut =
            (rng::from_seed(other_seed).next_u64() % base.draws_before_jump.len() as u64) as usize;
        let mut spliced = Counting {
            inner: SpliceRng {
                a: rng::from_seed(path_seed),
                b: rng::from_seed(other_seed),
                switch_at: base.draws_before_jump[cut],
                used: 0,
            },
            used: 0,
        };
        let other = trace(spec, rule, h_seed, &mut spliced, 64);
        // epochs 1..=cut+1 are decided before the first redrawn value
        let k = cut + 1;
        if other.decisions.len() < k || base.decisions[..k] != other.decisions[..k] {
            bad += 1;
        }
    }
    bad
}
