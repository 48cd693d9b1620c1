//! Replicate-parallel map over fixed index chunks.
//!
//! Chunks have a fixed size and results come back in chunk order, so any
//! reduction done by the caller is identical for every worker count.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Replicates per chunk.
pub const CHUNK: u64 = 4096;

/// Applies `f(start, end)` to consecutive chunks of `0..n` and returns the
/// results in chunk order. `workers = None` uses the global pool.
pub fn map_chunks<T, F>(n: u64, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync,
{
    let chunks: Vec<(u64, u64)> = (0..n.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(n)))
        .collect();
    let run = || -> Vec<Result<T>> { chunks.par_iter().map(|&(s, e)| f(s, e)).collect() };
    let out = match workers {
        None => run(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(run),
    };
    out.into_iter().collect()
}
