#![allow(dead_code)]

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pbij::TargetSpec;

/// `m` random finite targets with up to `max_pairs` pairs below `bound`.
pub fn random_targets(seed: u64, m: usize, max_pairs: usize, bound: u64) -> Vec<TargetSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| {
            let n = rng.random_range(1..=max_pairs);
            let (mut sources, mut images) = (HashSet::new(), HashSet::new());
            let mut pairs = Vec::new();
            while pairs.len() < n {
                let (x, y) = (rng.random_range(0..bound), rng.random_range(0..bound));
                if !sources.contains(&x) && !images.contains(&y) {
                    sources.insert(x);
                    images.insert(y);
                    pairs.push((x, y));
                }
            }
            pairs.sort();
            TargetSpec::Finite { pairs }
        })
        .collect()
}
