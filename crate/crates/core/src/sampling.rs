//! Seeded selection of interpolation nodes.
//!
//! Draws come from ChaCha8 seeded through `SeedableRng::seed_from_u64`, with
//! an explicit rejection sampler and Fisher-Yates shuffle, so a seed selects
//! the same vertices on every platform and release.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::graph::{VertexId, VertexSet};

/// Uniform integer in `0..bound`.
fn below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = (u64::MAX / bound) * bound;
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}

/// Seeded permutation of `0..n`.
pub fn seeded_permutation(n: usize, seed: u64) -> Vec<VertexId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<VertexId> = (0..n).collect();
    for i in (1..n).rev() {
        let j = below(&mut rng, i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    perm
}

/// `count` distinct vertices drawn uniformly without replacement.
pub fn sample_vertices(n: usize, count: usize, seed: u64) -> Result<VertexSet> {
    Ok(nested_samples(n, &[count], seed)?.remove(0))
}

/// Nested sample sets: the set for a smaller count is a prefix of the same
/// seeded permutation, hence a subset of every larger one.
pub fn nested_samples(n: usize, counts: &[usize], seed: u64) -> Result<Vec<VertexSet>> {
    if let Some(&bad) = counts.iter().find(|&&c| c == 0 || c > n) {
        return Err(Error::InvalidParam(format!(
            "sample count {bad} must lie in 1..={n}"
        )));
    }
    let perm = seeded_permutation(n, seed);
    Ok(counts
        .iter()
        .map(|&c| VertexSet::from_unsorted(perm[..c].iter().copied()))
        .collect())
}
