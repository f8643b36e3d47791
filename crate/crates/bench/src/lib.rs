//! Benchmark fixtures shared by the criterion targets.

use volrat::{random, HPolytope};

/// Seeded random polytopes, drawn once per benchmark.
pub fn fixtures(n: usize, count: usize, symmetric: bool) -> Vec<HPolytope> {
    let mut rng = random::rng(2024);
    (0..count)
        .map(|_| random::random_polytope(&mut rng, n, symmetric).expect("fixture polytope"))
        .collect()
}
