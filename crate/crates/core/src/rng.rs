//! Seed derivation and the uniform/normal primitives every sampler uses.
//!
//! Each replicate owns independent streams keyed by
//! `(master_seed, replicate_index, role, sub)`. The path stream and the
//! streams feeding independent horizons never share state, so a horizon
//! drawn for a replicate cannot depend on the path it is applied to.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// The generator used for every stream.
pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamRole {
    Path = 1,
    IndependentTime = 2,
    Horizon = 3,
    Auxiliary = 4,
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit seed for one stream.
pub fn stream_seed(master: u64, replicate: u64, role: StreamRole, sub: u32) -> u64 {
    let h = splitmix(master);
    let h = splitmix(h ^ replicate);
    splitmix(h ^ (((role as u64) << 32) | sub as u64))
}

pub fn stream(master: u64, replicate: u64, role: StreamRole, sub: u32) -> StreamRng {
    StreamRng::seed_from_u64(stream_seed(master, replicate, role, sub))
}

pub fn from_seed(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}

/// Uniform on [0, 1) with 53 bits of resolution.
#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on (0, 1].
#[inline]
pub fn uniform_open0<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    1.0 - uniform(rng)
}

/// Uniform on the open interval (0, 1).
#[inline]
pub fn uniform_open<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let mut r = rng;
    StandardNormal.sample(&mut r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roles_give_distinct_seeds() {
        let a = stream_seed(7, 3, StreamRole::Path, 0);
        let b = stream_seed(7, 3, StreamRole::IndependentTime, 0);
        let c = stream_seed(7, 4, StreamRole::Path, 0);
        let d = stream_seed(7, 3, StreamRole::IndependentTime, 1);
        assert!(a != b && a != c && b != d);
        assert_eq!(a, stream_seed(7, 3, StreamRole::Path, 0));
    }

    #[test]
    fn uniform_range() {
        let mut rng = from_seed(1);
        for _ in 0..10_000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
            let v = uniform_open0(&mut rng);
            assert!(v > 0.0 && v <= 1.0);
        }
    }
}
