// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

use crate::series::{GapSegment, TimeSeries};

/// Something an imputer did that a report may want to footnote.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FillNote {
    /// A leading gap under forward fill was taken from the next observation.
    ForwardFillLeadingFallback { cells: usize },
    /// A trailing gap under backward fill was taken from the last observation.
    BackwardFillTrailingFallback { cells: usize },
    /// Too few present values for the spline; linear interpolation was used.
    SplineFellBackToLinear { present: usize, needed: usize },
    /// The method reduces to global-mean fill on a single column.
    DegeneratesToMean,
}

/// Result of running any imputer over a series.
#[derive(Clone, Debug, PartialEq)]
pub struct ImputationOutcome {
    /// Output series; cells of `skipped` gaps are still missing.
    pub series: TimeSeries,
    /// `(index, value)` for every cell that was missing and is now present, ascending.
    pub filled: Vec<(usize, f64)>,
    /// Gaps the method declined to fill.
    pub skipped: Vec<GapSegment>,
    pub notes: Vec<FillNote>,
}

impl ImputationOutcome {
    /// Builds an outcome from an input series and a completely filled copy.
    pub(crate) fn from_filled(
        input: &TimeSeries,
        output: TimeSeries,
        notes: Vec<FillNote>,
    ) -> Self {
        let filled = input
            .values()
            .iter()
            .zip(output.values())
            .enumerate()
            .filter(|(_, (before, _))| before.is_nan())
            .map(|(i, (_, after))| (i, *after))
            .collect();
        Self {
            series: output,
            filled,
            skipped: Vec::new(),
            notes,
        }
    }

    pub fn skipped_cells(&self) -> usize {
        self.skipped.iter().map(|g| g.len).sum()
    }
}
