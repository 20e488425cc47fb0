// SPDX-License-Identifier: MIT OR Apache-2.0

//! Scores an imputation against the values that were blanked.
//!
//! Pointwise and distributional metrics are computed over the blanked
//! positions only. Undefined quantities (R² of a constant truth, NRMSE of a
//! zero-range truth, MAPE when every truth value is zero) are `None` rather
//! than a number.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{ImputeError, Result};
use crate::outcome::ImputationOutcome;
use crate::series::TimeSeries;

pub const DEFAULT_BINS: usize = 50;
pub const JS_SMOOTHING: f64 = 1e-10;

/// Column order of the metric suite.
pub const METRIC_NAMES: [&str; 9] = [
    "MAE",
    "RMSE",
    "MAPE",
    "NRMSE",
    "R2",
    "JS_Divergence",
    "Wasserstein",
    "Correlation_Diff",
    "Time",
];

/// Whether larger values of a metric are better.
pub fn higher_is_better(metric: &str) -> bool {
    metric == "R2"
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseErrors {
    pub mae: f64,
    pub rmse: f64,
    pub mape: Option<f64>,
    pub nrmse: Option<f64>,
    pub r2: Option<f64>,
    pub evaluated_points: usize,
    pub mape_skipped_zeros: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub mae: f64,
    pub rmse: f64,
    pub mape: Option<f64>,
    pub nrmse: Option<f64>,
    pub r2: Option<f64>,
    pub js_divergence: f64,
    pub wasserstein: f64,
    pub correlation_diff: Option<f64>,
    pub time_seconds: f64,
    pub evaluated_points: usize,
    pub mape_skipped_zeros: usize,
    /// Fraction of blanked cells the method actually filled.
    pub coverage: f64,
}

impl MetricReport {
    /// Metric value by column name (see [`METRIC_NAMES`]).
    pub fn get(&self, metric: &str) -> Option<f64> {
        match metric {
            "MAE" => Some(self.mae),
            "RMSE" => Some(self.rmse),
            "MAPE" => self.mape,
            "NRMSE" => self.nrmse,
            "R2" => self.r2,
            "JS_Divergence" => Some(self.js_divergence),
            "Wasserstein" => Some(self.wasserstein),
            "Correlation_Diff" => self.correlation_diff,
            "Time" => Some(self.time_seconds),
            _ => None,
        }
    }
}

/// MAE, RMSE, MAPE (zeros skipped), range-normalised RMSE and R² over the
/// truth positions.
pub fn pointwise_errors(truth: &[(usize, f64)], imputed: &TimeSeries) -> Result<PointwiseErrors> {
    if truth.is_empty() {
        return Err(ImputeError::NoEvaluatedPoints);
    }
    let pairs = paired(truth, imputed)?;
    let n = pairs.len() as f64;

    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    let mut pct_sum = 0.0;
    let mut pct_count = 0usize;
    let mut skipped = 0usize;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut y_sum = 0.0;
    for &(y, yhat) in &pairs {
        let e = yhat - y;
        abs_sum += e.abs();
        sq_sum += e * e;
        if y == 0.0 {
            skipped += 1;
        } else {
            pct_sum += (e / y).abs();
            pct_count += 1;
        }
        lo = lo.min(y);
        hi = hi.max(y);
        y_sum += y;
    }
    let mae = abs_sum / n;
    let rmse = (sq_sum / n).sqrt();
    let mape = (pct_count > 0).then(|| 100.0 * pct_sum / pct_count as f64);
    let range = hi - lo;
    let nrmse = (range > 0.0).then(|| rmse / range);
    let y_mean = y_sum / n;
    let ss_tot: f64 = pairs.iter().map(|&(y, _)| (y - y_mean).powi(2)).sum();
    let r2 = (ss_tot > 0.0).then(|| 1.0 - sq_sum / ss_tot);

    Ok(PointwiseErrors {
        mae,
        rmse,
        mape,
        nrmse,
        r2,
        evaluated_points: pairs.len(),
        mape_skipped_zeros: skipped,
    })
}

fn paired(truth: &[(usize, f64)], imputed: &TimeSeries) -> Result<Vec<(f64, f64)>> {
    truth
        .iter()
        .map(|&(i, y)| match imputed.get(i) {
            Some(v) => Ok((y, v)),
            None => Err(ImputeError::UnfilledTruthIndex { index: i }),
        })
        .collect()
}

/// Jensen-Shannon divergence (base 2, so bounded by 1) between histograms of
/// `a` and `b` over their shared range.
pub fn js_divergence(a: &[f64], b: &[f64], bins: usize) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(ImputeError::EmptySample);
    }
    if bins == 0 {
        return Err(ImputeError::InvalidInput("bins must be positive".into()));
    }
    let lo = a.iter().chain(b).copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().chain(b).copied().fold(f64::NEG_INFINITY, f64::max);
    let p = histogram(a, lo, hi, bins);
    let q = histogram(b, lo, hi, bins);

    let mut js = 0.0;
    for (&pi, &qi) in p.iter().zip(&q) {
        let m = 0.5 * (pi + qi);
        // sum of the two halves is commutative, so js(a, b) == js(b, a) bit for bit
        js += 0.5 * (pi * (pi / m).log2()) + 0.5 * (qi * (qi / m).log2());
    }
    Ok(js.clamp(0.0, 1.0))
}

fn histogram(sample: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut counts = vec![0usize; bins];
    let width = hi - lo;
    for &x in sample {
        let idx = if width > 0.0 {
            (((x - lo) / width) * bins as f64).floor() as usize
        } else {
            0
        };
        counts[idx.min(bins - 1)] += 1;
    }
    let total = sample.len() as f64;
    let smoothed: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / total + JS_SMOOTHING)
        .collect();
    let norm: f64 = smoothed.iter().sum();
    smoothed.into_iter().map(|p| p / norm).collect()
}

/// First Wasserstein distance between two empirical distributions.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(ImputeError::EmptySample);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    if a.len() == b.len() {
        let total: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        return Ok(total / a.len() as f64);
    }
    Ok(cdf_area(&a, &b))
}

/// ∫|F_a − F_b| over the merged support of two sorted samples.
pub(crate) fn cdf_area(a: &[f64], b: &[f64]) -> f64 {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut area = 0.0;
    for w in all.windows(2) {
        let x = w[0];
        while ia < a.len() && a[ia] <= x {
            ia += 1;
        }
        while ib < b.len() && b[ib] <= x {
            ib += 1;
        }
        area += (ia as f64 / na - ib as f64 / nb).abs() * (w[1] - w[0]);
    }
    area
}

/// Lag-1 Pearson autocorrelation: correlation of `x[..n-1]` with `x[1..]`.
pub fn lag1_autocorrelation(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 3 {
        return Err(ImputeError::TooShort { needed: 3, got: n });
    }
    let head = &values[..n - 1];
    let tail = &values[1..];
    let m = (n - 1) as f64;
    let mh = head.iter().sum::<f64>() / m;
    let mt = tail.iter().sum::<f64>() / m;
    let mut cov = 0.0;
    let mut vh = 0.0;
    let mut vt = 0.0;
    for (h, t) in head.iter().zip(tail) {
        cov += (h - mh) * (t - mt);
        vh += (h - mh).powi(2);
        vt += (t - mt).powi(2);
    }
    if vh == 0.0 || vt == 0.0 {
        return Err(ImputeError::ZeroVariance("lag-1 autocorrelation"));
    }
    Ok(cov / (vh * vt).sqrt())
}

/// |ρ₁(original) − ρ₁(imputed)| for two complete series of equal length.
pub fn correlation_diff(original: &TimeSeries, imputed: &TimeSeries) -> Result<f64> {
    if original.len() != imputed.len() {
        return Err(ImputeError::LengthMismatch {
            left: original.len(),
            right: imputed.len(),
        });
    }
    if !original.is_complete() || !imputed.is_complete() {
        return Err(ImputeError::InvalidInput(
            "correlation_diff needs complete series".into(),
        ));
    }
    let a = lag1_autocorrelation(original.values())?;
    let b = lag1_autocorrelation(imputed.values())?;
    Ok((a - b).abs())
}

/// Runs `f` `repeats` times (at least once) and returns the last result with
/// the median wall-clock time in seconds.
pub fn timed<T>(repeats: usize, mut f: impl FnMut() -> T) -> (T, f64) {
    let mut times = Vec::with_capacity(repeats.max(1));
    let mut result = None;
    for _ in 0..repeats.max(1) {
        let started = Instant::now();
        let out = f();
        times.push(started.elapsed().as_secs_f64());
        result = Some(out);
    }
    (result.expect("ran at least once"), median(&mut times))
}

/// Median of a slice (midpoint of the central pair for even lengths). Reorders the slice.
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Full metric row for one imputation of one corrupted series.
///
/// Only positions the method filled are scored; `coverage` records the
/// filled share of `truth`.
pub fn score(
    original: &TimeSeries,
    truth: &[(usize, f64)],
    outcome: &ImputationOutcome,
    time_seconds: f64,
    bins: usize,
) -> Result<MetricReport> {
    if truth.is_empty() {
        return Err(ImputeError::NoEvaluatedPoints);
    }
    let scored: Vec<(usize, f64)> = truth
        .iter()
        .copied()
        .filter(|&(i, _)| outcome.series.get(i).is_some())
        .collect();
    let coverage = scored.len() as f64 / truth.len() as f64;
    let pw = pointwise_errors(&scored, &outcome.series)?;
    let truth_sample: Vec<f64> = scored.iter().map(|&(_, v)| v).collect();
    let imputed_sample: Vec<f64> = scored
        .iter()
        .map(|&(i, _)| outcome.series.values()[i])
        .collect();
    let js = js_divergence(&truth_sample, &imputed_sample, bins)?;
    let w1 = wasserstein_1d(&truth_sample, &imputed_sample)?;
    let corr = if outcome.series.is_complete() {
        correlation_diff(original, &outcome.series).ok()
    } else {
        None
    };
    Ok(MetricReport {
        mae: pw.mae,
        rmse: pw.rmse,
        mape: pw.mape,
        nrmse: pw.nrmse,
        r2: pw.r2,
        js_divergence: js,
        wasserstein: w1,
        correlation_diff: corr,
        time_seconds,
        evaluated_points: pw.evaluated_points,
        mape_skipped_zeros: pw.mape_skipped_zeros,
        coverage,
    })
}
