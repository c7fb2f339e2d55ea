//! Deterministic work partitioning for the Monte Carlo code.
//!
//! Work is split into indexed units (trial chunks, replications, grid
//! points). Each unit owns a random stream derived from the run seed and the
//! unit index, never from the worker that happens to execute it, so results
//! are bit-identical for any thread count. With the `parallel` feature off,
//! [`Execution::Parallel`] runs sequentially.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Seed from which every random stream of a run is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamSeed(pub u64);

/// Stream families. Distinct tags never share a stream.
pub mod tags {
    pub const OUTAGE_TRIALS: u64 = 1;
    pub const DAY: u64 = 2;
    pub const OUTAGE_PICK: u64 = 3;
    pub const CAPACITY_PICK: u64 = 4;
    pub const EMPIRICAL_TRIALS: u64 = 5;
    pub const VALIDATION: u64 = 6;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl StreamSeed {
    /// Independent ChaCha stream for unit `index` of family `tag`.
    pub fn stream(&self, tag: u64, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(self.0 ^ splitmix64(tag)));
        rng.set_stream(index);
        rng
    }

    /// Derived seed for a nested run (e.g. one grid point of a sweep).
    pub fn child(&self, index: u64) -> StreamSeed {
        StreamSeed(splitmix64(self.0.wrapping_add(splitmix64(index ^ 0xA5A5_A5A5))))
    }
}

/// Trials per chunk; fixed so the partition never depends on thread count.
pub const TRIAL_CHUNK: u64 = 16_384;

/// Runs `trials` Bernoulli-style trials in fixed chunks and returns the sum
/// of per-chunk counts. `chunk` receives its stream and chunk length.
pub fn count_in_chunks<F>(trials: u64, seed: StreamSeed, tag: u64, exec: Execution, chunk: F) -> u64
where
    F: Fn(&mut ChaCha8Rng, u64) -> u64 + Sync + Send,
{
    let n_chunks = trials.div_ceil(TRIAL_CHUNK);
    map_indexed(n_chunks as usize, exec, |i| {
        let len = TRIAL_CHUNK.min(trials - i as u64 * TRIAL_CHUNK);
        let mut rng = seed.stream(tag, i as u64);
        chunk(&mut rng, len)
    })
    .into_iter()
    .sum()
}
