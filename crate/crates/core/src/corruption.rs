// SPDX-License-Identifier: MIT OR Apache-2.0

//! MCAR corruption: blank whole gaps at uniformly drawn positions while keeping
//! the removed values as ground truth.
//!
//! Randomness comes from ChaCha8 seeded with [`CorruptionPlan::seed`], so a plan
//! reproduces bit-for-bit on any platform. Injected gaps are always separated
//! by at least one surviving value, which means [`scan_gaps`](crate::series::scan_gaps)
//! on the corrupted series recovers exactly the drawn gap sizes.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ImputeError, Result};
use crate::series::TimeSeries;

/// Name of the generator echoed into reports.
pub const GENERATOR: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64)";

/// Preset missing fractions for plan templates.
pub const PRESET_FRACTIONS: [f64; 4] = [0.05, 0.10, 0.20, 0.50];

/// Region of the series that gaps are drawn into.
///
/// `LeftOnly` and `RightOnly` use the first and last third of the series
/// (gaps there may touch the series end); `MiddleOnly` uses the central third
/// and never touches either end.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    #[default]
    Anywhere,
    LeftOnly,
    MiddleOnly,
    RightOnly,
}

impl Placement {
    pub fn as_str(self) -> &'static str {
        match self {
            Placement::Anywhere => "anywhere",
            Placement::LeftOnly => "left_only",
            Placement::MiddleOnly => "middle_only",
            Placement::RightOnly => "right_only",
        }
    }

    /// Index range gaps may occupy.
    pub fn zone(self, n: usize) -> Range<usize> {
        let third = n.div_ceil(3);
        match self {
            Placement::Anywhere => 0..n,
            Placement::LeftOnly => 0..third,
            Placement::RightOnly => n - third..n,
            Placement::MiddleOnly => {
                let lo = (n / 3).max(1);
                let hi = (n - n / 3).min(n.saturating_sub(1));
                lo..hi.max(lo)
            }
        }
    }
}

/// How many cells to blank, in what gap sizes, where, and with which seed.
///
/// `gap_mix` weights are over gap *count*: `{1: 1.0, 3: 1.0}` draws as many
/// single gaps as triple gaps on average.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptionPlan {
    #[serde(default)]
    pub seed: u64,
    pub target_fraction: f64,
    pub gap_mix: BTreeMap<usize, f64>,
    #[serde(default)]
    pub placement: Placement,
}

impl CorruptionPlan {
    pub fn new(seed: u64, target_fraction: f64, gap_mix: BTreeMap<usize, f64>) -> Self {
        Self {
            seed,
            target_fraction,
            gap_mix,
            placement: Placement::Anywhere,
        }
    }

    /// Gaps of one size only.
    pub fn single_size(seed: u64, target_fraction: f64, size: usize) -> Self {
        Self::new(seed, target_fraction, BTreeMap::from([(size, 1.0)]))
    }

    /// Equal weights over sizes 1 through 5.
    pub fn mixed(seed: u64, target_fraction: f64) -> Self {
        Self::new(seed, target_fraction, (1..=5).map(|s| (s, 1.0)).collect())
    }

    pub fn with_placement(mut self, placement: Placement) -> Self {
        self.placement = placement;
        self
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn largest_gap(&self) -> usize {
        self.active_sizes().last().copied().unwrap_or(0)
    }

    fn active_sizes(&self) -> Vec<usize> {
        self.gap_mix
            .iter()
            .filter(|(_, &w)| w > 0.0)
            .map(|(&s, _)| s)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_fraction > 0.0 && self.target_fraction < 1.0) {
            return Err(ImputeError::InvalidPlan(format!(
                "target_fraction must lie in (0, 1), got {}",
                self.target_fraction
            )));
        }
        if self.gap_mix.is_empty() {
            return Err(ImputeError::InvalidPlan("gap_mix is empty".into()));
        }
        for (&size, &weight) in &self.gap_mix {
            if size == 0 {
                return Err(ImputeError::InvalidPlan(
                    "gap sizes must be positive".into(),
                ));
            }
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(ImputeError::InvalidPlan(format!(
                    "weight for gap size {size} must be finite and non-negative"
                )));
            }
        }
        if self.active_sizes().is_empty() {
            return Err(ImputeError::InvalidPlan(
                "all gap_mix weights are zero".into(),
            ));
        }
        Ok(())
    }

    /// Number of cells the plan aims to blank on a series of length `n`.
    pub fn target_count(&self, n: usize) -> usize {
        (self.target_fraction * n as f64).round() as usize
    }
}

/// A corrupted series with the removed values.
#[derive(Clone, Debug, PartialEq)]
pub struct CorruptedPair {
    pub corrupted: TimeSeries,
    /// `(index, original value)` for every blanked cell, ascending.
    pub truth: Vec<(usize, f64)>,
    pub plan_echo: CorruptionPlan,
    /// Injected gaps as `(start, len)`, ascending by start.
    pub gaps: Vec<(usize, usize)>,
}

impl CorruptedPair {
    /// Writes the truth back, reconstructing the original series.
    pub fn restore(&self) -> TimeSeries {
        let mut values = self.corrupted.values().to_vec();
        for &(i, v) in &self.truth {
            values[i] = v;
        }
        TimeSeries::new(values).expect("truth values are finite")
    }
}

/// Largest number of cells that can be blanked on a series of length `n`
/// using only the positively weighted sizes of `gap_mix`, with every pair of
/// gaps separated and at least one value left.
pub fn feasible_mass(n: usize, gap_mix: &BTreeMap<usize, f64>, placement: Placement) -> usize {
    let sizes: Vec<usize> = gap_mix
        .iter()
        .filter(|(&s, &w)| s > 0 && w > 0.0)
        .map(|(&s, _)| s)
        .collect();
    if n == 0 || sizes.is_empty() {
        return 0;
    }
    let zone = placement.zone(n);
    let width = zone.len();
    let whole_series = width == n;

    // best[m]: most cells blankable in a run of m cells
    let mut best = vec![0usize; width + 1];
    for m in 1..=width {
        let mut b = best[m - 1];
        for &s in sizes.iter().filter(|&&s| s <= m) {
            if whole_series && m == n && s == n {
                continue;
            }
            let rest = if m > s { best[m - s - 1] } else { 0 };
            b = b.max(s + rest);
        }
        best[m] = b;
    }
    best[width]
}

/// Blanks cells of a complete series according to `plan`.
pub fn corrupt(series: &TimeSeries, plan: &CorruptionPlan) -> Result<CorruptedPair> {
    plan.validate()?;
    let missing = series.missing_count();
    if missing > 0 {
        return Err(ImputeError::SeriesHasMissing { count: missing });
    }
    let n = series.len();
    let target = plan.target_count(n);
    let capacity = feasible_mass(n, &plan.gap_mix, plan.placement);
    if target > capacity {
        return Err(ImputeError::InfeasiblePlan(format!(
            "{target} missing cells requested but at most {capacity} fit in {n} values with separation"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let sizes = draw_sizes(plan, target, &mut rng);
    let zone = plan.placement.zone(n);
    let total: usize = sizes.iter().sum();
    let packed_width = total + sizes.len().saturating_sub(1);
    if packed_width > zone.len() || (zone.len() == n && total >= n) {
        return Err(ImputeError::InfeasiblePlan(format!(
            "drawn gap sizes {sizes:?} cannot be separated within {} cells",
            zone.len()
        )));
    }

    let starts = place(&sizes, zone, n, &mut rng);

    let mut values = series.values().to_vec();
    let mut gaps: Vec<(usize, usize)> = starts.into_iter().zip(sizes).collect();
    gaps.sort_unstable();
    let mut truth = Vec::with_capacity(total);
    for &(start, len) in &gaps {
        for (i, value) in values.iter_mut().enumerate().skip(start).take(len) {
            truth.push((i, *value));
            *value = f64::NAN;
        }
    }
    truth.sort_unstable_by_key(|&(i, _)| i);
    Ok(CorruptedPair {
        corrupted: TimeSeries::new(values)?,
        truth,
        plan_echo: plan.clone(),
        gaps,
    })
}

/// Draws gap sizes by weight until at least `target` cells are covered.
fn draw_sizes(plan: &CorruptionPlan, target: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let entries: Vec<(usize, f64)> = plan
        .gap_mix
        .iter()
        .filter(|(_, &w)| w > 0.0)
        .map(|(&s, &w)| (s, w))
        .collect();
    let dist = WeightedIndex::new(entries.iter().map(|&(_, w)| w)).expect("validated weights");
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < target {
        let s = entries[dist.sample(rng)].0;
        sizes.push(s);
        total += s;
    }
    sizes
}

/// Picks start positions: uniform rejection sampling first, then a greedy
/// left-to-right scan once 10·n rejections are spent, and finally a packed
/// layout from the zone start if the greedy scan runs out of room.
fn place(sizes: &[usize], zone: Range<usize>, n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut blanked = vec![false; n];
    let mut starts = Vec::with_capacity(sizes.len());
    let mut budget = 10 * n;

    let free = |blanked: &[bool], start: usize, len: usize| {
        let lo = start.saturating_sub(1);
        let hi = (start + len + 1).min(n);
        !blanked[lo..hi].iter().any(|&b| b)
    };

    for &len in sizes {
        let last_start = zone.end - len;
        let mut chosen = None;
        while budget > 0 {
            let start = rng.random_range(zone.start..=last_start);
            if free(&blanked, start, len) {
                chosen = Some(start);
                break;
            }
            budget -= 1;
        }
        if chosen.is_none() {
            chosen = (zone.start..=last_start).find(|&s| free(&blanked, s, len));
        }
        match chosen {
            Some(start) => {
                blanked[start..start + len]
                    .iter_mut()
                    .for_each(|b| *b = true);
                starts.push(start);
            }
            None => return packed(sizes, zone.start),
        }
    }
    starts
}

fn packed(sizes: &[usize], from: usize) -> Vec<usize> {
    let mut at = from;
    sizes
        .iter()
        .map(|&len| {
            let start = at;
            at += len + 1;
            start
        })
        .collect()
}

/// Derives an independent 64-bit seed from a master seed and a stream path
/// using SplitMix64 finalisation. Used for per-trial seeds so parallel and
/// serial runs see identical corruption.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    for &p in path {
        h = splitmix64(h ^ splitmix64(p.wrapping_add(0x9E37_79B9_7F4A_7C15)));
    }
    h
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::scan_gaps;

    fn ramp(n: usize) -> TimeSeries {
        TimeSeries::new((0..n).map(|i| i as f64 * 0.5 + 1.0).collect()).unwrap()
    }

    #[test]
    fn ten_percent_singles() {
        let plan = CorruptionPlan::single_size(7, 0.10, 1);
        let pair = corrupt(&ramp(100), &plan).unwrap();
        assert_eq!(pair.truth.len(), 10);
        assert_eq!(pair.corrupted.missing_count(), 10);
        let gaps = scan_gaps(&pair.corrupted).unwrap();
        assert_eq!(gaps.len(), 10);
        assert!(gaps.iter().all(|g| g.len == 1));
    }

    #[test]
    fn same_seed_same_output() {
        let plan = CorruptionPlan::mixed(42, 0.2);
        let a = corrupt(&ramp(200), &plan).unwrap();
        let b = corrupt(&ramp(200), &plan).unwrap();
        assert_eq!(
            a.corrupted
                .values()
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>(),
            b.corrupted
                .values()
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>()
        );
        assert_eq!(a.gaps, b.gaps);
    }

    #[test]
    fn infeasible_and_invalid() {
        let plan = CorruptionPlan::single_size(1, 0.99, 1);
        assert!(matches!(
            corrupt(&ramp(10), &plan),
            Err(ImputeError::InfeasiblePlan(_))
        ));

        let mut gappy = ramp(10).into_values();
        gappy[3] = f64::NAN;
        let gappy = TimeSeries::new(gappy).unwrap();
        assert!(matches!(
            corrupt(&gappy, &CorruptionPlan::single_size(1, 0.1, 1)),
            Err(ImputeError::SeriesHasMissing { count: 1 })
        ));

        for bad in [0.0, 1.0, -0.2, f64::NAN] {
            assert!(CorruptionPlan::single_size(1, bad, 1).validate().is_err());
        }
        let zero = CorruptionPlan::new(1, 0.1, BTreeMap::from([(2, 0.0)]));
        assert!(zero.validate().is_err());
    }

    #[test]
    fn feasible_mass_examples() {
        let one = BTreeMap::from([(1, 1.0)]);
        let five = BTreeMap::from([(5, 1.0)]);
        assert_eq!(feasible_mass(10, &one, Placement::Anywhere), 5);
        assert_eq!(feasible_mass(10, &five, Placement::Anywhere), 5);
        assert_eq!(feasible_mass(1, &one, Placement::Anywhere), 0);
        assert_eq!(feasible_mass(5, &five, Placement::Anywhere), 0);
    }

    #[test]
    fn placement_zones_are_respected() {
        let n = 300;
        for (placement, zone) in [
            (Placement::LeftOnly, 0..100),
            (Placement::MiddleOnly, 100..200),
            (Placement::RightOnly, 200..300),
        ] {
            assert_eq!(placement.zone(n), zone);
            for seed in 0..20 {
                let plan = CorruptionPlan::mixed(seed, 0.1).with_placement(placement);
                let pair = corrupt(&ramp(n), &plan).unwrap();
                assert!(pair.truth.iter().all(|(i, _)| zone.contains(i)));
            }
        }
        assert_eq!(Placement::MiddleOnly.zone(3), 1..2);
    }

    #[test]
    fn restore_reconstructs() {
        let s = ramp(150);
        let pair = corrupt(&s, &CorruptionPlan::mixed(3, 0.3)).unwrap();
        assert_eq!(pair.restore(), s);
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, &[0, 0, 0]);
        let b = derive_seed(1, &[0, 0, 1]);
        let c = derive_seed(2, &[0, 0, 0]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(1, &[0, 0, 0]));
    }

    #[test]
    fn plan_json_round_trip() {
        let plan = CorruptionPlan::mixed(9, 0.25).with_placement(Placement::MiddleOnly);
        let json = serde_json::to_string(&plan).unwrap();
        let back: CorruptionPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(back, plan);
    }
}
