// SPDX-License-Identifier: MIT OR Apache-2.0

//! Repeated corrupt → impute → score trials and their aggregation.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{impute, ImputerSpec, Method};
use crate::config::BenchConfig;
use crate::corruption::{corrupt, derive_seed, CorruptionPlan, GENERATOR};
use crate::error::{ImputeError, Result};
use crate::metrics::{higher_is_better, score, timed, METRIC_NAMES};
use crate::series::TimeSeries;

pub const METRIC_COUNT: usize = METRIC_NAMES.len();
const TIME: usize = METRIC_COUNT - 1;
const MAE: usize = 0;

pub const SEED_SCHEME: &str =
    "trial seed = derive_seed(master_seed, [plan.seed, dataset_index, plan_index, trial]) (SplitMix64 chain)";

/// One method's score on one corrupted series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub dataset_index: usize,
    pub dataset: String,
    pub plan_index: usize,
    pub plan: String,
    pub trial: usize,
    pub seed: u64,
    pub method_index: usize,
    pub method: String,
    /// In [`METRIC_NAMES`] order; `None` where undefined or nothing was filled.
    pub metrics: [Option<f64>; METRIC_COUNT],
    pub evaluated_points: usize,
    pub mape_skipped_zeros: usize,
    pub coverage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub dataset_index: usize,
    pub dataset: String,
    pub plan_index: usize,
    pub plan: String,
    pub method_index: usize,
    pub method: String,
    pub trials: usize,
    pub coverage_mean: f64,
    pub mean: [Option<f64>; METRIC_COUNT],
    /// Sample standard deviation; `None` with fewer than two defined values.
    pub std: [Option<f64>; METRIC_COUNT],
    /// Trials on which each metric was defined.
    pub defined: [usize; METRIC_COUNT],
}

impl AggregateRow {
    pub fn mean_of(&self, metric: &str) -> Option<f64> {
        metric_index(metric).and_then(|i| self.mean[i])
    }
}

/// MAE improvement of `candidate` over `reference` within one (dataset, plan).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub dataset: String,
    pub plan: String,
    pub reference: String,
    pub candidate: String,
    pub reference_mae: f64,
    pub candidate_mae: f64,
    pub pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRow {
    pub dataset: String,
    pub plan: String,
    pub method: String,
    pub values: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub master_seed: u64,
    pub trials: usize,
    pub generator: String,
    pub seed_scheme: String,
    pub decisions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<TrialRow>,
    pub aggregates: Vec<AggregateRow>,
    pub improvements: Vec<Improvement>,
    pub heatmap_metrics: Vec<String>,
    pub heatmap: Vec<HeatmapRow>,
    pub metadata: RunMetadata,
}

pub fn metric_index(metric: &str) -> Option<usize> {
    METRIC_NAMES.iter().position(|m| *m == metric)
}

pub fn plan_label(plan: &CorruptionPlan) -> String {
    let mix = plan
        .gap_mix
        .iter()
        .map(|(s, w)| format!("{s}:{w}"))
        .collect::<Vec<_>>()
        .join(" ");
    format!(
        "{}% gaps[{mix}] {}",
        plan.target_fraction * 100.0,
        plan.placement.as_str()
    )
}

/// `100 · (reference − candidate) / reference`; negative when the candidate is worse.
pub fn improvement_pct(reference_error: f64, candidate_error: f64) -> Result<f64> {
    if !(reference_error > 0.0) || !reference_error.is_finite() {
        return Err(ImputeError::ZeroReference(reference_error));
    }
    if !(candidate_error >= 0.0) {
        return Err(ImputeError::InvalidInput(format!(
            "candidate error must be non-negative, got {candidate_error}"
        )));
    }
    Ok(100.0 * (reference_error - candidate_error) / reference_error)
}

/// Min-max scales one metric column so 1 is best. Constant columns map to 1;
/// `None` entries stay `None` and do not affect the range.
pub fn normalize_column(values: &[Option<f64>], higher_better: bool) -> Vec<Option<f64>> {
    let defined = values.iter().flatten().copied();
    let lo = defined.clone().fold(f64::INFINITY, f64::min);
    let hi = defined.fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|v| {
            v.map(|v| {
                if hi - lo <= 0.0 {
                    1.0
                } else if higher_better {
                    (v - lo) / (hi - lo)
                } else {
                    (hi - v) / (hi - lo)
                }
            })
        })
        .collect()
}

/// Metrics shown in the heatmap: everything but Time unless asked.
pub fn heatmap_metrics(include_time: bool) -> Vec<&'static str> {
    METRIC_NAMES
        .iter()
        .copied()
        .filter(|m| include_time || *m != "Time")
        .collect()
}

/// Normalised method × metric matrix for each (dataset, plan) block.
pub fn normalize_for_heatmap(aggregates: &[AggregateRow], metrics: &[&str]) -> Vec<HeatmapRow> {
    let mut out = Vec::with_capacity(aggregates.len());
    for block in blocks(aggregates) {
        let columns: Vec<Vec<Option<f64>>> = metrics
            .iter()
            .map(|m| {
                let raw: Vec<Option<f64>> = block.iter().map(|a| a.mean_of(m)).collect();
                normalize_column(&raw, higher_is_better(m))
            })
            .collect();
        for (r, a) in block.iter().enumerate() {
            out.push(HeatmapRow {
                dataset: a.dataset.clone(),
                plan: a.plan.clone(),
                method: a.method.clone(),
                values: columns.iter().map(|c| c[r]).collect(),
            });
        }
    }
    out
}

/// Consecutive aggregate rows sharing a (dataset, plan).
fn blocks(aggregates: &[AggregateRow]) -> Vec<&[AggregateRow]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=aggregates.len() {
        let boundary = i == aggregates.len()
            || (aggregates[i].dataset_index, aggregates[i].plan_index)
                != (
                    aggregates[start].dataset_index,
                    aggregates[start].plan_index,
                );
        if boundary {
            if start < i {
                out.push(&aggregates[start..i]);
            }
            start = i;
        }
    }
    out
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (Some(mean), Some((ss / (n - 1.0)).sqrt()))
}

/// Groups per-trial rows by (dataset, plan, method) in first-seen order.
pub fn aggregate(rows: &[TrialRow]) -> Vec<AggregateRow> {
    let mut keys: Vec<(usize, usize, usize)> = Vec::new();
    for r in rows {
        let k = (r.dataset_index, r.plan_index, r.method_index);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.sort();
    keys.into_iter()
        .map(|k| {
            let group: Vec<&TrialRow> = rows
                .iter()
                .filter(|r| (r.dataset_index, r.plan_index, r.method_index) == k)
                .collect();
            let first = group[0];
            let mut mean = [None; METRIC_COUNT];
            let mut std = [None; METRIC_COUNT];
            let mut defined = [0; METRIC_COUNT];
            for m in 0..METRIC_COUNT {
                let vals: Vec<f64> = group.iter().filter_map(|r| r.metrics[m]).collect();
                defined[m] = vals.len();
                (mean[m], std[m]) = mean_std(&vals);
            }
            let coverage: Vec<f64> = group.iter().map(|r| r.coverage).collect();
            AggregateRow {
                dataset_index: k.0,
                dataset: first.dataset.clone(),
                plan_index: k.1,
                plan: first.plan.clone(),
                method_index: k.2,
                method: first.method.clone(),
                trials: group.len(),
                coverage_mean: mean_std(&coverage).0.unwrap_or(0.0),
                mean,
                std,
                defined,
            }
        })
        .collect()
}

/// MAE improvements of every method against each configured reference.
pub fn improvements(
    aggregates: &[AggregateRow],
    methods: &[ImputerSpec],
    references: &[Method],
) -> Vec<Improvement> {
    let mut out = Vec::new();
    for block in blocks(aggregates) {
        for reference in references {
            let Some(ref_idx) = methods.iter().position(|m| m.method == *reference) else {
                continue;
            };
            let Some(ref_row) = block.iter().find(|a| a.method_index == ref_idx) else {
                continue;
            };
            let Some(ref_mae) = ref_row.mean[MAE] else {
                continue;
            };
            for cand in block.iter().filter(|a| a.method_index != ref_idx) {
                let Some(cand_mae) = cand.mean[MAE] else {
                    continue;
                };
                out.push(Improvement {
                    dataset: cand.dataset.clone(),
                    plan: cand.plan.clone(),
                    reference: ref_row.method.clone(),
                    candidate: cand.method.clone(),
                    reference_mae: ref_mae,
                    candidate_mae: cand_mae,
                    pct: improvement_pct(ref_mae, cand_mae).ok(),
                });
            }
        }
    }
    out
}

pub fn metadata(config: &BenchConfig) -> RunMetadata {
    let mut decisions = vec![
        "gap_mix weights are over gap count, not missing-cell mass".to_string(),
        "all metrics are computed over blanked positions only".to_string(),
        "NRMSE divides RMSE by the range of the true values".to_string(),
        "MAPE skips zero true values; undefined metrics are reported as NaN".to_string(),
        "Correlation_Diff is the absolute difference of lag-1 autocorrelations".to_string(),
        "methods that leave cells unfilled are scored on filled cells; coverage reported"
            .to_string(),
        "Time is the median wall-clock seconds over repeats_for_timing runs".to_string(),
    ];
    decisions.push(if config.heatmap_includes_time {
        "heatmap includes Time".to_string()
    } else {
        "heatmap excludes Time".to_string()
    });
    RunMetadata {
        master_seed: config.master_seed,
        trials: config.trials,
        generator: GENERATOR.to_string(),
        seed_scheme: SEED_SCHEME.to_string(),
        decisions,
    }
}

impl BenchReport {
    /// Derives every aggregate view from retained per-trial rows.
    pub fn from_rows(rows: Vec<TrialRow>, config: &BenchConfig) -> Self {
        let aggregates = aggregate(&rows);
        let improvements = improvements(&aggregates, &config.methods, &config.reference_methods);
        let metrics = heatmap_metrics(config.heatmap_includes_time);
        let heatmap = normalize_for_heatmap(&aggregates, &metrics);
        Self {
            rows,
            aggregates,
            improvements,
            heatmap_metrics: metrics.iter().map(|m| m.to_string()).collect(),
            heatmap,
            metadata: metadata(config),
        }
    }
}

fn series_hash(series: &TimeSeries) -> u64 {
    let mut h = DefaultHasher::new();
    for v in series.values() {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

struct TrialJob<'a> {
    dataset_index: usize,
    dataset: &'a str,
    series: &'a TimeSeries,
    plan_index: usize,
    plan: &'a CorruptionPlan,
    plan_label: &'a str,
    trial: usize,
}

fn run_trial(job: &TrialJob<'_>, config: &BenchConfig) -> Result<Vec<TrialRow>> {
    let where_ = || {
        format!(
            "dataset {}, plan {}, trial {}",
            job.dataset, job.plan_index, job.trial
        )
    };
    let seed = derive_seed(
        config.master_seed,
        &[
            job.plan.seed,
            job.dataset_index as u64,
            job.plan_index as u64,
            job.trial as u64,
        ],
    );
    let pair = corrupt(job.series, &job.plan.with_seed(seed)).map_err(|e| e.context(where_()))?;
    let fingerprint = series_hash(&pair.corrupted);
    let mut rows = Vec::with_capacity(config.methods.len());
    for (method_index, spec) in config.methods.iter().enumerate() {
        let label = spec.label();
        if series_hash(&pair.corrupted) != fingerprint {
            return Err(ImputeError::Invariant(format!(
                "{}: corrupted input changed before {label}",
                where_()
            )));
        }
        let (outcome, secs) = timed(config.repeats_for_timing, || impute(spec, &pair.corrupted));
        let outcome = outcome.map_err(|e| e.context(format!("{}, method {label}", where_())))?;
        let mut metrics = [None; METRIC_COUNT];
        metrics[TIME] = Some(secs);
        let (evaluated_points, mape_skipped_zeros, coverage) = match score(
            job.series,
            &pair.truth,
            &outcome,
            secs,
            config.histogram_bins,
        ) {
            Ok(r) => {
                if r.mae > r.rmse * (1.0 + 1e-12) {
                    return Err(ImputeError::Invariant(format!(
                        "{}, method {label}: MAE {} exceeds RMSE {}",
                        where_(),
                        r.mae,
                        r.rmse
                    )));
                }
                for (m, name) in METRIC_NAMES.iter().enumerate() {
                    metrics[m] = r.get(name);
                }
                (r.evaluated_points, r.mape_skipped_zeros, r.coverage)
            }
            Err(ImputeError::NoEvaluatedPoints) => (0, 0, 0.0),
            Err(e) => return Err(e.context(format!("{}, method {label}", where_()))),
        };
        rows.push(TrialRow {
            dataset_index: job.dataset_index,
            dataset: job.dataset.to_string(),
            plan_index: job.plan_index,
            plan: job.plan_label.to_string(),
            trial: job.trial,
            seed,
            method_index,
            method: label,
            metrics,
            evaluated_points,
            mape_skipped_zeros,
            coverage,
        });
    }
    Ok(rows)
}

/// Runs the benchmark, resolving relative dataset paths against the working directory.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    run_bench_at(config, Path::new("."))
}

/// Runs the benchmark with relative dataset paths resolved against `base`.
pub fn run_bench_at(config: &BenchConfig, base: &Path) -> Result<BenchReport> {
    config.validate()?;
    let datasets = config
        .datasets
        .iter()
        .map(|d| {
            let label = d.label();
            let series = d
                .load(base, &config.ingest)
                .map_err(|e| e.context(format!("loading dataset {label}")))?;
            if !series.is_complete() {
                return Err(ImputeError::SeriesHasMissing {
                    count: series.missing_count(),
                }
                .context(format!("dataset {label}")));
            }
            Ok((label, series))
        })
        .collect::<Result<Vec<_>>>()?;
    config.check_feasible(&datasets)?;
    let labels: Vec<String> = config.plans.iter().map(plan_label).collect();

    let mut jobs = Vec::new();
    for (d, (name, series)) in datasets.iter().enumerate() {
        for (p, plan) in config.plans.iter().enumerate() {
            for t in 0..config.trials {
                jobs.push(TrialJob {
                    dataset_index: d,
                    dataset: name,
                    series,
                    plan_index: p,
                    plan,
                    plan_label: &labels[p],
                    trial: t,
                });
            }
        }
    }
    let per_trial: Vec<Vec<TrialRow>> = if config.parallel {
        jobs.par_iter()
            .map(|j| run_trial(j, config))
            .collect::<Result<_>>()?
    } else {
        jobs.iter()
            .map(|j| run_trial(j, config))
            .collect::<Result<_>>()?
    };
    let rows = per_trial.into_iter().flatten().collect();
    Ok(BenchReport::from_rows(rows, config))
}
