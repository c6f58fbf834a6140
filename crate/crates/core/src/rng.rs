//! Counter-based random streams for reproducible parallel Monte Carlo.
//!
//! Trials are cut into fixed-size chunks; chunk `c` draws from the ChaCha8
//! stream `c` of the caller's seed. Results therefore do not depend on how
//! many threads rayon uses.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Trials per chunk.
pub const CHUNK_TRIALS: u64 = 256;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `trials` trials in parallel chunks and returns the per-chunk results in chunk order.
///
/// `work(rng, count)` must run `count` trials drawing only from `rng`.
pub fn chunked<T, F>(trials: u64, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS);
            work(&mut stream(seed, c), count)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                chunked(5000, 11, |rng, n| (0..n).map(|_| rng.random::<u32>() as u64).sum::<u64>())
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn chunk_sizes_cover_all_trials() {
        let sizes = chunked(600, 0, |_, n| n);
        assert_eq!(sizes, vec![256, 256, 88]);
        assert!(chunked(0, 0, |_, n| n).is_empty());
    }
}
