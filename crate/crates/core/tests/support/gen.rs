// SPDX-License-Identifier: MIT OR Apache-2.0

//! Random gappy series for oracle and property checks.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A series of `len` cells with gaps of 1..=`max_gap` cells punched at random,
/// including at both ends. At least one cell stays present.
pub fn gappy(rng: &mut ChaCha8Rng, len: usize, max_gap: usize) -> Vec<Option<f64>> {
    let level = rng.random_range(-50.0..50.0);
    let scale = rng.random_range(0.1..20.0);
    let mut v: Vec<Option<f64>> = (0..len)
        .map(|_| Some(level + scale * rng.random_range(-1.0..1.0)))
        .collect();
    let mut i = if rng.random_bool(0.3) {
        0
    } else {
        rng.random_range(1..6)
    };
    while i < len {
        let size = rng.random_range(1..=max_gap);
        for c in v.iter_mut().skip(i).take(size) {
            *c = None;
        }
        i += size + rng.random_range(1..12);
    }
    if rng.random_bool(0.3) {
        let size = rng.random_range(1..=max_gap).min(len - 1);
        for c in v.iter_mut().rev().take(size) {
            *c = None;
        }
    }
    if v.iter().all(Option::is_none) {
        v[len / 2] = Some(level);
    }
    v
}

pub fn to_nan(v: &[Option<f64>]) -> Vec<f64> {
    v.iter().map(|c| c.unwrap_or(f64::NAN)).collect()
}

pub fn scale_of(v: &[Option<f64>]) -> f64 {
    v.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}
