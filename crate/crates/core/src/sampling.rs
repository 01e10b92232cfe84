//! Seeded point sets shared by the samplers and checkers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A reproducible set of sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleSpec {
    /// `count` points uniform in the box `[lo, hi]^dim`.
    UniformBox { dim: usize, lo: f64, hi: f64, count: usize, seed: u64 },
    /// Explicit points.
    Points { points: Vec<Vec<f64>> },
}

impl SampleSpec {
    pub fn uniform_box(dim: usize, lo: f64, hi: f64, count: usize, seed: u64) -> Self {
        SampleSpec::UniformBox { dim, lo, hi, count, seed }
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        match self {
            SampleSpec::UniformBox { dim, lo, hi, count, seed } => {
                uniform_box_points(*dim, *lo, *hi, *count, *seed)
            }
            SampleSpec::Points { points } => points.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SampleSpec::UniformBox { count, .. } => *count == 0,
            SampleSpec::Points { points } => points.is_empty(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SampleSpec::UniformBox { dim, lo, hi, count, seed } => {
                format!("{count} uniform points in [{lo}, {hi}]^{dim} (seed {seed})")
            }
            SampleSpec::Points { points } => format!("{} explicit points", points.len()),
        }
    }
}

pub fn uniform_box_points(dim: usize, lo: f64, hi: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}
