//! Data-parallel sweep helpers.
//!
//! Verification sweeps are embarrassingly parallel: every item derives
//! its own RNG from `seed ^ index`, so results are independent of chunk
//! layout and thread count, and reports stay byte-identical across
//! `--jobs` settings.  The sequential path is always compiled; the rayon
//! path is behind the `parallel` feature (on by default) and the two are
//! compared in the criterion bench suite.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derives the per-item RNG; splitmix-style spread so neighboring
/// indices do not share streams.
pub fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Sequential map-reduce over `0..n`.
pub fn map_reduce_seq<R, F, M>(n: usize, map: F, identity: R, merge: M) -> R
where
    F: Fn(usize) -> R + Sync,
    M: Fn(R, R) -> R + Sync,
    R: Send,
{
    (0..n).map(&map).fold(identity, &merge)
}

/// Parallel map-reduce over `0..n`; merge must be associative and is
/// applied in index order within chunks, so commutative merges give
/// identical results on any thread count.
#[cfg(feature = "parallel")]
pub fn map_reduce_par<R, F, M, I>(n: usize, map: F, identity: I, merge: M) -> R
where
    F: Fn(usize) -> R + Sync + Send,
    M: Fn(R, R) -> R + Sync + Send,
    I: Fn() -> R + Sync + Send,
    R: Send,
{
    use rayon::prelude::*;
    // chunk so the split overhead amortizes over cheap items
    (0..n)
        .into_par_iter()
        .with_min_len(64)
        .map(map)
        .fold(&identity, &merge)
        .reduce(&identity, &merge)
}

/// Picks the parallel path when built with it, sequential otherwise.
pub fn map_reduce<R, F, M, I>(n: usize, map: F, identity: I, merge: M) -> R
where
    F: Fn(usize) -> R + Sync + Send,
    M: Fn(R, R) -> R + Sync + Send,
    I: Fn() -> R + Sync + Send,
    R: Send,
{
    #[cfg(feature = "parallel")]
    {
        map_reduce_par(n, map, identity, merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_reduce_seq(n, map, identity(), merge)
    }
}

/// Caps rayon worker threads; no-op on sequential builds or when the
/// global pool is already initialized.
pub fn configure_jobs(jobs: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}
