//! Per-trial random streams and the deterministic parallel trial driver.
//!
//! Every trial draws from its own generator, keyed by `(seed, trial index)`,
//! and the driver only sums integer outcomes. Results are therefore identical
//! for any number of worker threads.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use crate::error::Result;

pub type TrialRng = Xoshiro256PlusPlus;

const CHUNK: u64 = 256;
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed, e.g. one per grid point of a sweep.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Generator for trial `stream` under `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> TrialRng {
    let a = mix64(seed.wrapping_add(GOLDEN));
    let b = mix64(stream.wrapping_mul(GOLDEN) ^ a);
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        let word = mix64(a ^ b.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN)));
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    Xoshiro256PlusPlus::from_seed(key)
}

/// Runs `trials` independent Bernoulli trials and counts successes.
///
/// `threads == 0` uses the global rayon pool. The error reported when several
/// trials fail is whichever failure the reduction meets first.
pub fn count_successes<F>(trials: u64, seed: u64, threads: usize, trial: F) -> Result<u64>
where
    F: Fn(u64, &mut TrialRng) -> Result<bool> + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    let run = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut hits = 0u64;
                for i in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    let mut rng = trial_rng(seed, i);
                    hits += u64::from(trial(i, &mut rng)?);
                }
                Ok(hits)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    };
    if threads == 0 {
        run()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(run),
            // Thread spawning can fail in constrained sandboxes; the result
            // does not depend on the pool, so fall back to the global one.
            Err(_) => run(),
        }
    }
}
