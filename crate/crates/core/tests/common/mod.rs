#![allow(dead_code)]

use proptest::prelude::*;
use qrlab::{Covector, MultiIndex};

/// All increasing multi-indices of degree `k` in `1..=m`.
pub fn indices(m: usize, k: usize) -> Vec<MultiIndex> {
    (0u32..1 << m)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(MultiIndex::from_mask)
        .collect()
}

pub fn from_coeffs(m: usize, k: usize, coeffs: &[f64]) -> Covector {
    Covector::from_terms(m, k, indices(m, k).into_iter().zip(coeffs.iter().copied())).unwrap()
}

/// A dense random covector of the given shape.
pub fn covector(m: usize, k: usize) -> impl Strategy<Value = Covector> {
    let len = indices(m, k).len();
    prop::collection::vec(-2.0f64..2.0, len).prop_map(move |c| from_coeffs(m, k, &c))
}

/// Shape `(m, k)` with `2 ≤ m ≤ 5`, `0 ≤ k ≤ m`.
pub fn shape() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=5).prop_flat_map(|m| (Just(m), 0..=m))
}

pub fn coefficient_gap(a: &Covector, b: &Covector) -> f64 {
    (a - b).max_abs_coefficient()
}
