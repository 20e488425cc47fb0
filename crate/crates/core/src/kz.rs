// SPDX-License-Identifier: MIT OR Apache-2.0

//! The KZ gap-filling rule set.
//!
//! Each gap is classified by length and position and filled with nested
//! windowed means:
//!
//! | length | left / right boundary            | middle                                   |
//! |--------|----------------------------------|------------------------------------------|
//! | 1      | mean of next / previous 3        | mean of the two neighbours               |
//! | 2      | stepwise, window 4               | each cell: mean of 3 on its own side     |
//! | 3      | stepwise, window 5               | outer cells from 5-windows, centre = avg |
//! | 4      | stepwise, window 5               | outer-in pairs, 5-windows                |
//! | 5+     | stepwise, window 5               | anchors from 5-windows, midpoint fill    |
//!
//! "Stepwise" fills a left gap from its rightmost cell towards index 0 (a right
//! gap from its leftmost cell towards the end), and every freshly imputed cell
//! is visible to the windows of the cells filled after it.
//!
//! Gaps are imputed independently of each other: a gap's windows see the
//! originally present values plus that gap's own imputed cells, never cells
//! imputed for a neighbouring gap. This keeps the result independent of the
//! processing order, so reversing the input exactly mirrors the output.

use serde::{Deserialize, Serialize};

use crate::error::{ImputeError, Result};
use crate::outcome::ImputationOutcome;
use crate::series::{
    cached_mean, scan_gaps, take_k_nearest, Direction, GapPosition, GapSegment, TimeSeries,
};

pub const DEFAULT_MAX_GAP_SIZE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KzConfig {
    pub max_gap_size: usize,
}

impl Default for KzConfig {
    fn default() -> Self {
        Self {
            max_gap_size: DEFAULT_MAX_GAP_SIZE,
        }
    }
}

impl KzConfig {
    pub fn new(max_gap_size: usize) -> Result<Self> {
        if max_gap_size == 0 {
            return Err(ImputeError::InvalidParam {
                method: "kz".into(),
                key: "max_gap_size".into(),
                reason: "must be at least 1".into(),
            });
        }
        Ok(Self { max_gap_size })
    }
}

/// Window ("arm") length used by the boundary rules for a gap of `len` cells.
pub fn arm_length(len: usize) -> usize {
    match len {
        1 => 3,
        2 => 4,
        _ => 5,
    }
}

/// Fills every gap no longer than `config.max_gap_size`; longer gaps are
/// reported in `skipped` and left untouched.
pub fn kz_impute(series: &TimeSeries, config: &KzConfig) -> Result<ImputationOutcome> {
    let gaps = scan_gaps(series)?;
    let mut work = series.clone();
    let mut filled = Vec::with_capacity(series.missing_count());
    let mut skipped = Vec::new();

    for gap in gaps {
        if gap.len > config.max_gap_size {
            skipped.push(gap);
            continue;
        }
        fill_gap(&mut work, &gap)?;
        for i in gap.indices() {
            filled.push((i, work.values()[i]));
        }
        // hide this gap's values from the windows of later gaps
        for i in gap.indices() {
            work.clear(i);
        }
    }

    for &(i, v) in &filled {
        work.set(i, v);
    }
    Ok(ImputationOutcome {
        series: work,
        filled,
        skipped,
        notes: Vec::new(),
    })
}

/// Values for a single-cell gap.
pub fn impute_gap_1(series: &TimeSeries, gap: &GapSegment) -> Result<Vec<f64>> {
    impute_sized(
        series,
        gap,
        |len| len == 1,
        "impute_gap_1 expects a gap of length 1",
    )
}

/// Values for a two-cell gap.
pub fn impute_gap_2(series: &TimeSeries, gap: &GapSegment) -> Result<Vec<f64>> {
    impute_sized(
        series,
        gap,
        |len| len == 2,
        "impute_gap_2 expects a gap of length 2",
    )
}

/// Values for a three-cell gap.
pub fn impute_gap_3(series: &TimeSeries, gap: &GapSegment) -> Result<Vec<f64>> {
    impute_sized(
        series,
        gap,
        |len| len == 3,
        "impute_gap_3 expects a gap of length 3",
    )
}

/// Values for a four-cell gap.
pub fn impute_gap_4(series: &TimeSeries, gap: &GapSegment) -> Result<Vec<f64>> {
    impute_sized(
        series,
        gap,
        |len| len == 4,
        "impute_gap_4 expects a gap of length 4",
    )
}

/// Values for a gap of five or more cells.
pub fn impute_gap_5_plus(series: &TimeSeries, gap: &GapSegment) -> Result<Vec<f64>> {
    impute_sized(
        series,
        gap,
        |len| len >= 5,
        "impute_gap_5_plus expects a gap of length >= 5",
    )
}

fn impute_sized(
    series: &TimeSeries,
    gap: &GapSegment,
    accepts: impl Fn(usize) -> bool,
    message: &str,
) -> Result<Vec<f64>> {
    if !accepts(gap.len) {
        return Err(ImputeError::InvalidInput(message.to_string()));
    }
    check_gap(series, gap)?;
    let mut work = series.clone();
    fill_gap(&mut work, gap)?;
    Ok(gap.indices().map(|i| work.values()[i]).collect())
}

fn check_gap(series: &TimeSeries, gap: &GapSegment) -> Result<()> {
    let n = series.len();
    let valid = gap.len > 0
        && gap.end() <= n
        && gap.indices().all(|i| series.is_missing(i))
        && (gap.start == 0 || !series.is_missing(gap.start - 1))
        && (gap.end() == n || !series.is_missing(gap.end()))
        && !(gap.start == 0 && gap.end() == n);
    let position_ok = match gap.position {
        GapPosition::Left => gap.start == 0,
        GapPosition::Right => gap.end() == n && gap.start > 0,
        GapPosition::Middle => gap.start > 0 && gap.end() < n,
    };
    if valid && position_ok {
        Ok(())
    } else {
        Err(ImputeError::InvalidInput(format!(
            "{gap:?} is not a maximal gap of this series"
        )))
    }
}

/// Writes imputed values for `gap` into `work`, cell by cell in rule order.
fn fill_gap(work: &mut TimeSeries, gap: &GapSegment) -> Result<()> {
    match gap.position {
        GapPosition::Left => {
            let k = arm_length(gap.len);
            for i in gap.indices().rev() {
                fill_from_window(work, i, k, Direction::Following)?;
            }
            Ok(())
        }
        GapPosition::Right => {
            let k = arm_length(gap.len);
            for i in gap.indices() {
                fill_from_window(work, i, k, Direction::Preceding)?;
            }
            Ok(())
        }
        GapPosition::Middle => fill_middle(work, gap),
    }
}

fn fill_middle(work: &mut TimeSeries, gap: &GapSegment) -> Result<()> {
    let first = gap.start;
    let last = gap.end() - 1;
    match gap.len {
        1 => {
            let left = work.values()[first - 1];
            let right = work.values()[first + 1];
            work.set(first, midpoint(left, right));
        }
        2 => {
            fill_from_window(work, first, 3, Direction::Preceding)?;
            fill_from_window(work, last, 3, Direction::Following)?;
        }
        3 => {
            let left = fill_from_window(work, first, 5, Direction::Preceding)?;
            let right = fill_from_window(work, last, 5, Direction::Following)?;
            work.set(first + 1, midpoint(left, right));
        }
        4 => {
            fill_from_window(work, first, 5, Direction::Preceding)?;
            fill_from_window(work, first + 1, 5, Direction::Preceding)?;
            fill_from_window(work, last, 5, Direction::Following)?;
            fill_from_window(work, last - 1, 5, Direction::Following)?;
        }
        _ => {
            fill_from_window(work, first, 5, Direction::Preceding)?;
            fill_from_window(work, last, 5, Direction::Following)?;
            subdivide(work, first, last);
        }
    }
    Ok(())
}

fn fill_from_window(work: &mut TimeSeries, index: usize, k: usize, dir: Direction) -> Result<f64> {
    let window = take_k_nearest(work.len(), index, k, dir);
    let value = cached_mean(work, &window)?;
    work.set(index, value);
    Ok(value)
}

/// Fills the open interval between two filled cells by repeated midpoints.
/// An odd number of interior cells gets one centre cell; an even number gets
/// the two central cells set to the same midpoint, so the scheme is mirror
/// symmetric. For five cells this is g3 = (g1+g5)/2, g2 = (g1+g3)/2, g4 = (g3+g5)/2.
fn subdivide(work: &mut TimeSeries, lo: usize, hi: usize) {
    let span = hi - lo;
    if span < 2 {
        return;
    }
    let value = midpoint(work.values()[lo], work.values()[hi]);
    let m = lo + span / 2;
    work.set(m, value);
    if span % 2 == 0 {
        subdivide(work, lo, m);
        subdivide(work, m, hi);
    } else {
        work.set(m + 1, value);
        subdivide(work, lo, m);
        subdivide(work, m + 1, hi);
    }
}

/// Commutative mean of two values, clamped into their range.
fn midpoint(a: f64, b: f64) -> f64 {
    let m = (a + b) * 0.5;
    let m = if m.is_finite() { m } else { a * 0.5 + b * 0.5 };
    m.clamp(a.min(b), a.max(b))
}
