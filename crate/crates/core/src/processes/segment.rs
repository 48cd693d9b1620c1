//! The path between two consecutive epochs `[T_{n-1}, T_n)`.
//!
//! Linear segments are exact. Brownian segments are sampled lazily: the
//! endpoints are fixed when the segment opens, and interior knots, barrier
//! crossings and piece maxima are drawn on demand from a segment-local
//! stream, each conditioned on everything drawn before it.

use rand_distr::{Distribution, InverseGaussian};

use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, Copy)]
pub struct LinearSegment {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub slope: f64,
}

impl LinearSegment {
    pub fn value_at(&self, t: f64) -> f64 {
        self.x0 + self.slope * (t - self.t0)
    }

    pub fn x_end(&self) -> f64 {
        self.value_at(self.t1)
    }

    /// First time in `(t0, until)` with `X <= level`; `x0 > level` assumed.
    pub fn first_passage_below(&self, level: f64, until: f64) -> Option<f64> {
        if self.slope >= 0.0 {
            return None;
        }
        let theta = self.t0 + (self.x0 - level) / -self.slope;
        (theta < until).then_some(theta)
    }

    pub fn max_until(&self, t: f64) -> f64 {
        self.x0.max(self.value_at(t))
    }
}

/// What is known about the path inside one bridge piece.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Cond {
    Free,
    /// The piece is known to stay above this level.
    Above(f64),
    /// The piece hits its end value for the first time at its right end.
    FirstPassage,
}

#[derive(Debug, Clone)]
struct Piece {
    t0: f64,
    t1: f64,
    a: f64,
    b: f64,
    cond: Cond,
    max: Option<f64>,
}

/// Drifted Brownian motion between known endpoints.
#[derive(Debug, Clone)]
pub struct BrownianSegment {
    sigma2: f64,
    pieces: Vec<Piece>,
    rng: StreamRng,
}

/// `P{bridge from a to b over variance v dips to level}`, levels below both ends.
pub fn bridge_hit_probability(a: f64, b: f64, level: f64, v: f64) -> f64 {
    if a <= level || b <= level {
        return 1.0;
    }
    (-2.0 * (a - level) * (b - level) / v).exp()
}

/// Exact bridge maximum from a uniform `u` in (0, 1].
pub fn bridge_max_from_uniform(a: f64, b: f64, v: f64, u: f64) -> f64 {
    0.5 * (a + b + ((b - a).powi(2) - 2.0 * v * u.ln()).sqrt())
}

/// Applies `term(k)` for k = 0, +-1, +-2, ... until both tails are negligible.
fn two_sided_series<F: Fn(f64) -> f64>(term: F) -> f64 {
    let mut total = term(0.0);
    for k in 1..200_000 {
        let k = k as f64;
        let up = term(k);
        let down = term(-k);
        total += up + down;
        if up.abs() < 1e-18 && down.abs() < 1e-18 {
            break;
        }
    }
    total
}

/// `P{level < bridge < upper}` for a bridge from `a` to `b`, variance `v`.
pub fn strip_probability(a: f64, b: f64, level: f64, upper: f64, v: f64) -> f64 {
    let (x, y, w) = (a - level, b - level, upper - level);
    if x <= 0.0 || y <= 0.0 || x >= w || y >= w {
        return 0.0;
    }
    two_sided_series(|k| {
        (-2.0 * k * w * (k * w + y - x) / v).exp() - (-2.0 * (x + k * w) * (y + k * w) / v).exp()
    })
    .clamp(0.0, 1.0)
}

/// `P{max < upper | first hit of level at the end}` for a path of variance
/// `v` started at `a` above `level`.
pub fn first_passage_max_cdf(a: f64, level: f64, upper: f64, v: f64) -> f64 {
    let (x, w) = (a - level, upper - level);
    if w <= x {
        return 0.0;
    }
    two_sided_series(|k| (1.0 + 2.0 * k * w / x) * (-2.0 * k * w * (x + k * w) / v).exp())
        .clamp(0.0, 1.0)
}

/// Smallest `u` with `cdf(u) >= target`, for a cdf supported on `[lo, inf)`.
fn invert_cdf<F: Fn(f64) -> f64>(cdf: F, lo: f64, scale: f64, target: f64) -> f64 {
    let mut width = scale.max(1e-300);
    let mut hi = lo + width;
    while cdf(hi) < target {
        width *= 2.0;
        hi = lo + width;
        if !hi.is_finite() {
            return f64::MAX;
        }
    }
    let mut lo = lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Conditioning below this probability is ignored.
const NEGLIGIBLE: f64 = 1e-13;

impl BrownianSegment {
    pub fn new(t0: f64, t1: f64, x0: f64, x1: f64, sigma: f64, seed: u64) -> Self {
        BrownianSegment {
            sigma2: sigma * sigma,
            pieces: vec![Piece {
                t0,
                t1,
                a: x0,
                b: x1,
                cond: Cond::Free,
                max: None,
            }],
            rng: rng::from_seed(seed),
        }
    }

    pub fn t0(&self) -> f64 {
        self.pieces[0].t0
    }

    pub fn t1(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].t1
    }

    pub fn x0(&self) -> f64 {
        self.pieces[0].a
    }

    pub fn x_end(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].b
    }

    /// Index of the piece whose closed interval contains `t`.
    fn locate(&self, t: f64) -> usize {
        self.pieces
            .iter()
            .position(|p| t <= p.t1)
            .unwrap_or(self.pieces.len() - 1)
    }

    /// Splits at `t` if `t` is interior to a piece. Returns the index of
    /// the piece that now ends at `t`, or `None` when `t` is the left end.
    fn knot(&mut self, t: f64) -> Option<usize> {
        let i = self.locate(t);
        let p = self.pieces[i].clone();
        if t <= p.t0 {
            return i.checked_sub(1);
        }
        if t >= p.t1 {
            return Some(i);
        }
        let (d1, d2) = (t - p.t0, p.t1 - t);
        let delta = p.t1 - p.t0;
        let mean = p.a + (p.b - p.a) * d1 / delta;
        let sd = (self.sigma2 * d1 * d2 / delta).sqrt();
        let v = match p.cond {
            Cond::Free => mean + sd * rng::standard_normal(&mut self.rng),
            Cond::Above(level) => loop {
                // rejection against the no-hit event on both halves
                let v = mean + sd * rng::standard_normal(&mut self.rng);
                if v <= level {
                    continue;
                }
                let keep = (1.0 - bridge_hit_probability(p.a, v, level, self.sigma2 * d1))
                    * (1.0 - bridge_hit_probability(v, p.b, level, self.sigma2 * d2));
                if rng::uniform(&mut self.rng) < keep {
                    break v;
                }
            },
            Cond::FirstPassage => {
                panic!("interior knot requested inside a first-passage piece")
            }
        };
        let left = Piece {
            t0: p.t0,
            t1: t,
            a: p.a,
            b: v,
            cond: p.cond,
            max: None,
        };
        let right = Piece {
            t0: t,
            t1: p.t1,
            a: v,
            b: p.b,
            cond: p.cond,
            max: None,
        };
        self.pieces[i] = left;
        self.pieces.insert(i + 1, right);
        Some(i)
    }

    /// `X_t` for `t` in `[t0, t1]`.
    pub fn value_at(&mut self, t: f64) -> f64 {
        match self.knot(t) {
            None => self.x0(),
            Some(i) => self.pieces[i].b,
        }
    }

    /// First time in `(t0, until)` with `X <= level`; `x0 > level` assumed.
    pub fn first_passage_below(&mut self, level: f64, until: f64) -> Option<f64> {
        let until = until.min(self.t1());
        let last = self.knot(until)?;
        for i in 0..=last {
            let p = self.pieces[i].clone();
            if p.a <= level {
                return Some(p.t0);
            }
            let v = self.sigma2 * (p.t1 - p.t0);
            let hit = match p.cond {
                Cond::Above(known) if known >= level => continue,
                Cond::Above(_) => panic!("a lower barrier was already scanned in this piece"),
                Cond::FirstPassage => continue,
                Cond::Free => {
                    let ph = bridge_hit_probability(p.a, p.b, level, v);
                    rng::uniform(&mut self.rng) < ph
                }
            };
            if !hit {
                self.pieces[i].cond = Cond::Above(level);
                continue;
            }
            let theta = self.sample_hit_time(&p, level);
            if theta >= until {
                // rounding pushed the hit onto the boundary: fires at the next epoch
                self.pieces[i].cond = Cond::Above(level);
                continue;
            }
            let head = Piece {
                t0: p.t0,
                t1: theta,
                a: p.a,
                b: level,
                cond: Cond::FirstPassage,
                max: None,
            };
            let tail = Piece {
                t0: theta,
                t1: p.t1,
                a: level,
                b: p.b,
                cond: Cond::Free,
                max: None,
            };
            self.pieces[i] = head;
            self.pieces.insert(i + 1, tail);
            return Some(theta);
        }
        None
    }

    fn sample_hit_time(&mut self, p: &Piece, level: f64) -> f64 {
        let delta = p.t1 - p.t0;
        let d1 = p.a - level;
        let d2 = (p.b - level).abs();
        let shape = d1 * d1 / (self.sigma2 * delta);
        // s = (theta - t0) / (t1 - theta)
        let s = if d2 <= 1e-12 * d1 {
            let z = rng::standard_normal(&mut self.rng);
            shape / (z * z)
        } else {
            InverseGaussian::new(d1 / d2, shape)
                .expect("positive inverse Gaussian parameters")
                .sample(&mut self.rng)
        };
        let theta = p.t0 + delta * s / (1.0 + s);
        theta.clamp(p.t0, p.t1)
    }

    fn piece_max(&mut self, i: usize) -> f64 {
        if let Some(m) = self.pieces[i].max {
            return m;
        }
        let p = self.pieces[i].clone();
        let v = self.sigma2 * (p.t1 - p.t0);
        let m = match p.cond {
            Cond::Above(level) if bridge_hit_probability(p.a, p.b, level, v) > NEGLIGIBLE => {
                let no_hit = -(-2.0 * (p.a - level) * (p.b - level) / v).exp_m1();
                let u = rng::uniform_open(&mut self.rng);
                let lo = p.a.max(p.b);
                invert_cdf(
                    |up| strip_probability(p.a, p.b, level, up, v) / no_hit,
                    lo,
                    v.sqrt(),
                    u,
                )
            }
            Cond::FirstPassage => {
                let u = rng::uniform_open(&mut self.rng);
                invert_cdf(
                    |up| first_passage_max_cdf(p.a, p.b, up, v),
                    p.a,
                    v.sqrt(),
                    u,
                )
            }
            _ => bridge_max_from_uniform(p.a, p.b, v, rng::uniform_open0(&mut self.rng)),
        };
        self.pieces[i].max = Some(m);
        m
    }

    /// `sup X` over `[t0, t]`; with `exact = false` only knot values count.
    pub fn max_until(&mut self, t: f64, exact: bool) -> f64 {
        let Some(last) = self.knot(t) else {
            return self.x0();
        };
        let mut m = f64::NEG_INFINITY;
        for i in 0..=last {
            let p = &self.pieces[i];
            let v = if exact {
                self.piece_max(i)
            } else {
                p.a.max(p.b)
            };
            m = m.max(v);
        }
        m
    }
}

#[derive(Debug, Clone)]
pub enum Segment {
    Linear(LinearSegment),
    Brownian(Box<BrownianSegment>),
}

impl Segment {
    pub fn t0(&self) -> f64 {
        match self {
            Segment::Linear(s) => s.t0,
            Segment::Brownian(s) => s.t0(),
        }
    }

    /// The candidate epoch `T_n`.
    pub fn t1(&self) -> f64 {
        match self {
            Segment::Linear(s) => s.t1,
            Segment::Brownian(s) => s.t1(),
        }
    }

    pub fn x0(&self) -> f64 {
        match self {
            Segment::Linear(s) => s.x0,
            Segment::Brownian(s) => s.x0(),
        }
    }

    /// Left limit `X_{T_n - 0}`.
    pub fn x_end(&self) -> f64 {
        match self {
            Segment::Linear(s) => s.x_end(),
            Segment::Brownian(s) => s.x_end(),
        }
    }

    pub fn value_at(&mut self, t: f64) -> f64 {
        match self {
            Segment::Linear(s) => s.value_at(t),
            Segment::Brownian(s) => s.value_at(t),
        }
    }

    pub fn first_passage_below(&mut self, level: f64, until: f64) -> Option<f64> {
        match self {
            Segment::Linear(s) => s.first_passage_below(level, until),
            Segment::Brownian(s) => s.first_passage_below(level, until),
        }
    }

    pub fn max_until(&mut self, t: f64, exact: bool) -> f64 {
        match self {
            Segment::Linear(s) => s.max_until(t),
            Segment::Brownian(s) => s.max_until(t, exact),
        }
    }
}
