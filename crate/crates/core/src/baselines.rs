// SPDX-License-Identifier: MIT OR Apache-2.0

//! Comparison imputers sharing the [`ImputationOutcome`] contract with the KZ engine.
//!
//! KNN and the iterative (chained-equation) imputer need auxiliary feature
//! columns to do anything beyond a column mean. On a single univariate column
//! they have none, so both are implemented as exactly the global-mean fill;
//! their metric rows are bit-identical to the mean row.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ImputeError, Result};
use crate::kz::{kz_impute, KzConfig, DEFAULT_MAX_GAP_SIZE};
use crate::outcome::{FillNote, ImputationOutcome};
use crate::series::TimeSeries;
use crate::spline::{CubicSpline, MIN_SPLINE_POINTS};

pub const DEFAULT_KNN_K: usize = 5;
pub const DEFAULT_SPLINE_ORDER: usize = 3;
pub const DEFAULT_MAX_ITER: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Kz,
    Mean,
    Median,
    #[serde(alias = "ffill")]
    ForwardFill,
    #[serde(alias = "bfill")]
    BackwardFill,
    #[serde(alias = "linear")]
    LinearInterpolate,
    #[serde(alias = "spline")]
    SplineInterpolate,
    Knn,
    Iterative,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Kz,
        Method::Mean,
        Method::Median,
        Method::ForwardFill,
        Method::BackwardFill,
        Method::LinearInterpolate,
        Method::SplineInterpolate,
        Method::Knn,
        Method::Iterative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Kz => "kz",
            Method::Mean => "mean",
            Method::Median => "median",
            Method::ForwardFill => "forward_fill",
            Method::BackwardFill => "backward_fill",
            Method::LinearInterpolate => "linear_interpolate",
            Method::SplineInterpolate => "spline_interpolate",
            Method::Knn => "knn",
            Method::Iterative => "iterative",
        }
    }

    /// Parameter keys this method accepts, with their defaults.
    pub fn param_defaults(self) -> &'static [(&'static str, usize)] {
        match self {
            Method::Kz => &[("max_gap_size", DEFAULT_MAX_GAP_SIZE)],
            Method::Knn => &[("k", DEFAULT_KNN_K)],
            Method::SplineInterpolate => &[("order", DEFAULT_SPLINE_ORDER)],
            Method::Iterative => &[("max_iter", DEFAULT_MAX_ITER)],
            _ => &[],
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = ImputeError;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "kz" | "kzimputer" => Method::Kz,
            "mean" => Method::Mean,
            "median" => Method::Median,
            "ffill" | "forward_fill" => Method::ForwardFill,
            "bfill" | "backward_fill" => Method::BackwardFill,
            "linear" | "linear_interpolate" => Method::LinearInterpolate,
            "spline" | "spline_interpolate" => Method::SplineInterpolate,
            "knn" => Method::Knn,
            "iterative" | "iterative_imputer" => Method::Iterative,
            _ => return Err(ImputeError::InvalidInput(format!("unknown method `{s}`"))),
        };
        Ok(m)
    }
}

/// One imputation method plus its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImputerSpec {
    pub method: Method,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl ImputerSpec {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// The nine-method comparison roster with default parameters.
    pub fn roster() -> Vec<ImputerSpec> {
        Method::ALL.into_iter().map(ImputerSpec::new).collect()
    }

    /// Rejects unknown keys and out-of-range values.
    pub fn validate(&self) -> Result<()> {
        let allowed = self.method.param_defaults();
        for (key, &value) in &self.params {
            if !allowed.iter().any(|(k, _)| k == key) {
                return Err(self.param_error(key, "unknown parameter"));
            }
            if !(value.fract() == 0.0 && value >= 1.0 && value <= u32::MAX as f64) {
                return Err(self.param_error(key, "must be a positive integer"));
            }
        }
        if self.method == Method::SplineInterpolate && self.param("order") != DEFAULT_SPLINE_ORDER {
            return Err(self.param_error("order", "only cubic (order 3) splines are supported"));
        }
        Ok(())
    }

    /// Integer parameter value, falling back to the method default (0 if the key is foreign).
    pub fn param(&self, key: &str) -> usize {
        self.params
            .get(key)
            .map(|&v| v as usize)
            .unwrap_or_else(|| {
                self.method
                    .param_defaults()
                    .iter()
                    .find(|(k, _)| *k == key)
                    .map_or(0, |&(_, d)| d)
            })
    }

    /// Human-readable label used in reports.
    pub fn label(&self) -> String {
        match self.method {
            Method::Kz => {
                let g = self.param("max_gap_size");
                if g == DEFAULT_MAX_GAP_SIZE {
                    "KZImputer".into()
                } else {
                    format!("KZImputer (max_gap={g})")
                }
            }
            Method::Mean => "Mean".into(),
            Method::Median => "Median".into(),
            Method::ForwardFill => "Forward Fill".into(),
            Method::BackwardFill => "Backward Fill".into(),
            Method::LinearInterpolate => "Linear Interpolate".into(),
            Method::SplineInterpolate => "Spline Interpolate".into(),
            Method::Knn => format!("KNN (k={})", self.param("k")),
            Method::Iterative => "IterativeImputer".into(),
        }
    }

    fn param_error(&self, key: &str, reason: &str) -> ImputeError {
        ImputeError::InvalidParam {
            method: self.method.to_string(),
            key: key.to_string(),
            reason: reason.to_string(),
        }
    }
}

/// Runs the imputer described by `spec`. Every method except KZ returns a
/// complete series.
pub fn impute(spec: &ImputerSpec, series: &TimeSeries) -> Result<ImputationOutcome> {
    spec.validate()?;
    let (filled, notes) = match spec.method {
        Method::Kz => return kz_impute(series, &KzConfig::new(spec.param("max_gap_size"))?),
        Method::Mean => (mean_fill(series)?, vec![]),
        Method::Median => (median_fill(series)?, vec![]),
        Method::ForwardFill => {
            let lead = leading_missing(series);
            let notes = if lead > 0 {
                vec![FillNote::ForwardFillLeadingFallback { cells: lead }]
            } else {
                vec![]
            };
            (ffill(series)?, notes)
        }
        Method::BackwardFill => {
            let trail = trailing_missing(series);
            let notes = if trail > 0 {
                vec![FillNote::BackwardFillTrailingFallback { cells: trail }]
            } else {
                vec![]
            };
            (bfill(series)?, notes)
        }
        Method::LinearInterpolate => (linear_interp(series)?, vec![]),
        Method::SplineInterpolate => match spline_interp(series) {
            Ok(s) => (s, vec![]),
            Err(ImputeError::SplineTooFewPoints { needed, found, .. }) => (
                linear_interp(series)?,
                vec![FillNote::SplineFellBackToLinear {
                    present: found,
                    needed,
                }],
            ),
            Err(e) => return Err(e),
        },
        Method::Knn => (
            knn_fill(series, spec.param("k"))?,
            vec![FillNote::DegeneratesToMean],
        ),
        Method::Iterative => (
            iterative_fill(series, spec.param("max_iter"))?,
            vec![FillNote::DegeneratesToMean],
        ),
    };
    Ok(ImputationOutcome::from_filled(series, filled, notes))
}

fn require_present(series: &TimeSeries) -> Result<()> {
    if series.present_values().next().is_none() {
        Err(ImputeError::AllMissing)
    } else {
        Ok(())
    }
}

fn fill_with(series: &TimeSeries, value: f64) -> TimeSeries {
    let values = series
        .values()
        .iter()
        .map(|&v| if v.is_nan() { value } else { v })
        .collect();
    TimeSeries::new(values).expect("filled values are finite")
}

/// Global mean of the present values.
pub fn global_mean(series: &TimeSeries) -> Result<f64> {
    require_present(series)?;
    let (sum, count) = series
        .present_values()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    Ok(sum / count as f64)
}

/// Median of the present values; the midpoint of the two central order
/// statistics for an even count.
pub fn global_median(series: &TimeSeries) -> Result<f64> {
    require_present(series)?;
    let mut v: Vec<f64> = series.present_values().collect();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Ok(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

pub fn mean_fill(series: &TimeSeries) -> Result<TimeSeries> {
    Ok(fill_with(series, global_mean(series)?))
}

pub fn median_fill(series: &TimeSeries) -> Result<TimeSeries> {
    Ok(fill_with(series, global_median(series)?))
}

/// KNN on a lone column has no feature space to search; reduces to [`mean_fill`].
pub fn knn_fill(series: &TimeSeries, k: usize) -> Result<TimeSeries> {
    if k == 0 {
        return Err(ImputeError::InvalidParam {
            method: "knn".into(),
            key: "k".into(),
            reason: "must be at least 1".into(),
        });
    }
    mean_fill(series)
}

/// Chained-equation imputation on a lone column has no predictors; reduces to [`mean_fill`].
pub fn iterative_fill(series: &TimeSeries, max_iter: usize) -> Result<TimeSeries> {
    if max_iter == 0 {
        return Err(ImputeError::InvalidParam {
            method: "iterative".into(),
            key: "max_iter".into(),
            reason: "must be at least 1".into(),
        });
    }
    mean_fill(series)
}

fn leading_missing(series: &TimeSeries) -> usize {
    series.values().iter().take_while(|v| v.is_nan()).count()
}

fn trailing_missing(series: &TimeSeries) -> usize {
    series
        .values()
        .iter()
        .rev()
        .take_while(|v| v.is_nan())
        .count()
}

/// Last observation carried forward; a leading gap takes the first observation.
pub fn ffill(series: &TimeSeries) -> Result<TimeSeries> {
    require_present(series)?;
    let first = series.present_values().next().expect("checked above");
    let mut last = first;
    let values = series
        .values()
        .iter()
        .map(|&v| {
            if v.is_nan() {
                last
            } else {
                last = v;
                v
            }
        })
        .collect();
    TimeSeries::new(values)
}

/// Next observation carried backward; a trailing gap takes the last observation.
pub fn bfill(series: &TimeSeries) -> Result<TimeSeries> {
    Ok(ffill(&series.reversed())?.reversed())
}

/// Straight line between the bracketing observations; boundary gaps repeat the
/// nearest observation.
pub fn linear_interp(series: &TimeSeries) -> Result<TimeSeries> {
    require_present(series)?;
    let src = series.values();
    let n = src.len();
    let mut out = src.to_vec();
    let mut prev: Option<usize> = None;
    let mut i = 0;
    while i < n {
        if !src[i].is_nan() {
            prev = Some(i);
            i += 1;
            continue;
        }
        let start = i;
        while i < n && src[i].is_nan() {
            i += 1;
        }
        let next = (i < n).then_some(i);
        for (j, cell) in out.iter_mut().enumerate().take(i).skip(start) {
            *cell = match (prev, next) {
                (Some(l), Some(r)) => {
                    let t = (j - l) as f64 / (r - l) as f64;
                    src[l] + (src[r] - src[l]) * t
                }
                (Some(l), None) => src[l],
                (None, Some(r)) => src[r],
                (None, None) => unreachable!("series has a present value"),
            };
        }
    }
    TimeSeries::new(out)
}

/// Cubic spline through every present point, evaluated at the missing indices.
/// Boundary gaps are extrapolated with the outermost cubic piece.
pub fn spline_interp(series: &TimeSeries) -> Result<TimeSeries> {
    require_present(series)?;
    let (x, y): (Vec<f64>, Vec<f64>) = series.present().map(|(i, v)| (i as f64, v)).unzip();
    if x.len() < MIN_SPLINE_POINTS {
        return Err(ImputeError::SplineTooFewPoints {
            order: DEFAULT_SPLINE_ORDER,
            needed: MIN_SPLINE_POINTS,
            found: x.len(),
        });
    }
    let spline = CubicSpline::fit(&x, &y)?;
    let values: Vec<f64> = series
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| if v.is_nan() { spline.eval(i as f64) } else { v })
        .collect();
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(ImputeError::NonFiniteValue {
            index,
            value: values[index],
        });
    }
    TimeSeries::new(values)
}
