// SPDX-License-Identifier: MIT OR Apache-2.0

//! Fixtures shared by the criterion benches.

use kzimpute_core::corruption::{corrupt, CorruptionPlan};
use kzimpute_core::synthetic::{ar1, Ar1Config};
use kzimpute_core::TimeSeries;

/// AR(1) series of length `n` with `fraction` of its cells blanked in gaps of sizes 1 to 5.
pub fn gappy_series(n: usize, fraction: f64, seed: u64) -> TimeSeries {
    let clean = ar1(&Ar1Config {
        n,
        phi: 0.8,
        noise_std: 1.0,
        offset: 10.0,
        seed,
    })
    .expect("valid AR(1) config");
    corrupt(&clean, &CorruptionPlan::mixed(seed, fraction))
        .expect("feasible plan")
        .corrupted
}
