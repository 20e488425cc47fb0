// SPDX-License-Identifier: MIT OR Apache-2.0

//! Univariate series with NaN-encoded missing values, gap scanning and the
//! windowed mean every imputation rule is built from.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{ImputeError, Result};

/// A fixed-length sequence of optional values. Missing cells are stored as NaN;
/// every present value is finite.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series from raw values. NaN marks a missing cell; infinities are rejected.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(ImputeError::EmptySeries);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| v.is_infinite()) {
            return Err(ImputeError::NonFiniteValue { index, value });
        }
        Ok(Self { values })
    }

    pub fn from_options(values: &[Option<f64>]) -> Result<Self> {
        Self::new(values.iter().map(|v| v.unwrap_or(f64::NAN)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: a series holds at least one cell.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raw storage, NaN for missing cells.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.values.get(index).copied().filter(|v| !v.is_nan())
    }

    pub fn is_missing(&self, index: usize) -> bool {
        self.values[index].is_nan()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_nan()).count()
    }

    pub fn is_complete(&self) -> bool {
        !self.values.iter().any(|v| v.is_nan())
    }

    pub fn present_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied().filter(|v| !v.is_nan())
    }

    /// `(index, value)` pairs of present cells in index order.
    pub fn present(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, v)| !v.is_nan())
    }

    pub fn to_options(&self) -> Vec<Option<f64>> {
        self.values
            .iter()
            .map(|v| if v.is_nan() { None } else { Some(*v) })
            .collect()
    }

    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { values }
    }

    /// Sets a present value. Callers guarantee finiteness.
    pub(crate) fn set(&mut self, index: usize, value: f64) {
        debug_assert!(value.is_finite());
        self.values[index] = value;
    }

    pub(crate) fn clear(&mut self, index: usize) {
        self.values[index] = f64::NAN;
    }
}

/// Where a gap sits relative to the series ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapPosition {
    /// Touches index 0.
    Left,
    /// Bounded by present values on both sides.
    Middle,
    /// Touches index n-1.
    Right,
}

/// One maximal run of missing cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GapSegment {
    pub start: usize,
    pub len: usize,
    pub position: GapPosition,
}

impl GapSegment {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn indices(&self) -> Range<usize> {
        self.start..self.end()
    }
}

/// Finds every maximal missing run in ascending start order.
///
/// A series with no present value at all has no anchor for any rule and is
/// rejected with [`ImputeError::AllMissing`].
pub fn scan_gaps(series: &TimeSeries) -> Result<Vec<GapSegment>> {
    let values = series.values();
    let n = values.len();
    let mut gaps = Vec::new();
    let mut i = 0;
    while i < n {
        if !values[i].is_nan() {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && values[i].is_nan() {
            i += 1;
        }
        if start == 0 && i == n {
            return Err(ImputeError::AllMissing);
        }
        let position = if start == 0 {
            GapPosition::Left
        } else if i == n {
            GapPosition::Right
        } else {
            GapPosition::Middle
        };
        gaps.push(GapSegment {
            start,
            len: i - start,
            position,
        });
    }
    Ok(gaps)
}

/// Which side of an anchor cell a window extends to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Preceding,
    Following,
}

/// A contiguous index range into a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub indices: Range<usize>,
    pub direction: Direction,
}

impl Window {
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Up to `k` cells strictly before or after `anchor`, truncated at the series bounds.
pub fn take_k_nearest(len: usize, anchor: usize, k: usize, direction: Direction) -> Window {
    debug_assert!(anchor < len);
    let indices = match direction {
        Direction::Preceding => anchor.saturating_sub(k)..anchor,
        Direction::Following => {
            let start = (anchor + 1).min(len);
            start..(anchor + 1).saturating_add(k).min(len)
        }
    };
    Window { indices, direction }
}

/// Arithmetic mean of the present values inside `window`.
///
/// Values are summed in sorted order so the result does not depend on the
/// order of cells in the window, and the result is clamped to the window's
/// value range to absorb rounding.
pub fn cached_mean(series: &TimeSeries, window: &Window) -> Result<f64> {
    let Range { start, end } = window.indices.clone();
    if start > end || end > series.len() {
        return Err(ImputeError::WindowOutOfBounds {
            start,
            end,
            len: series.len(),
        });
    }
    mean_of_present(&series.values()[start..end]).ok_or(ImputeError::EmptyWindow { start, end })
}

/// Order-invariant mean of the non-NaN entries; `None` if there are none.
pub(crate) fn mean_of_present(values: &[f64]) -> Option<f64> {
    let mut present: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    if present.is_empty() {
        return None;
    }
    present.sort_by(f64::total_cmp);
    let sum: f64 = present.iter().sum();
    let mean = sum / present.len() as f64;
    Some(mean.clamp(present[0], present[present.len() - 1]))
}
