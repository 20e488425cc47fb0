// SPDX-License-Identifier: MIT OR Apache-2.0

//! JSON run configuration for the benchmark.
//!
//! ```json
//! {
//!   "master_seed": 7,
//!   "trials": 100,
//!   "methods": [{"method": "kz"}, {"method": "knn", "params": {"k": 5}}],
//!   "plans": [{"target_fraction": 0.1, "gap_mix": {"1": 1.0}}],
//!   "datasets": [
//!     {"kind": "csv", "path": "T1.csv", "column": "Wind Speed (m/s)"},
//!     {"kind": "ar1", "n": 1000, "phi": 0.8, "seed": 3}
//!   ]
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::{ImputerSpec, Method};
use crate::corruption::{feasible_mass, CorruptionPlan};
use crate::error::{ImputeError, Result};
use crate::io::{ingest_csv, ColumnRef, CsvOptions};
use crate::metrics::DEFAULT_BINS;
use crate::series::TimeSeries;
use crate::synthetic::{ar1, sine_trend, Ar1Config, SineTrendConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    Csv {
        path: PathBuf,
        column: ColumnRef,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    Ar1 {
        n: usize,
        phi: f64,
        #[serde(default = "unit")]
        noise_std: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    SineTrend {
        n: usize,
        period: f64,
        amplitude: f64,
        #[serde(default)]
        slope: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        noise_std: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
}

fn unit() -> f64 {
    1.0
}

impl DatasetSpec {
    pub fn label(&self) -> String {
        match self {
            DatasetSpec::Csv { name: Some(n), .. }
            | DatasetSpec::Ar1 { name: Some(n), .. }
            | DatasetSpec::SineTrend { name: Some(n), .. } => n.clone(),
            DatasetSpec::Csv { path, column, .. } => {
                let stem = path
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                format!("{stem}:{column}")
            }
            DatasetSpec::Ar1 { n, phi, seed, .. } => format!("ar1(n={n},phi={phi},seed={seed})"),
            DatasetSpec::SineTrend { n, seed, .. } => format!("sine_trend(n={n},seed={seed})"),
        }
    }

    /// Loads or generates the series. Relative CSV paths resolve against `base`.
    pub fn load(&self, base: &Path, csv: &CsvOptions) -> Result<TimeSeries> {
        match self {
            DatasetSpec::Csv { path, column, .. } => {
                let full = if path.is_relative() {
                    base.join(path)
                } else {
                    path.clone()
                };
                ingest_csv(&full, column, csv)
            }
            DatasetSpec::Ar1 {
                n,
                phi,
                noise_std,
                offset,
                seed,
                ..
            } => ar1(&Ar1Config {
                n: *n,
                phi: *phi,
                noise_std: *noise_std,
                offset: *offset,
                seed: *seed,
            }),
            DatasetSpec::SineTrend {
                n,
                period,
                amplitude,
                slope,
                offset,
                noise_std,
                seed,
                ..
            } => sine_trend(&SineTrendConfig {
                n: *n,
                period: *period,
                amplitude: *amplitude,
                slope: *slope,
                offset: *offset,
                noise_std: *noise_std,
                seed: *seed,
            }),
        }
    }
}

/// Benchmark configuration. The same document doubles as the CLI run config:
/// ingestion options and output directory live alongside the protocol fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub master_seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub methods: Vec<ImputerSpec>,
    pub plans: Vec<CorruptionPlan>,
    pub datasets: Vec<DatasetSpec>,
    #[serde(default = "default_repeats")]
    pub repeats_for_timing: usize,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    /// Methods that every other method's improvement percentage is measured against.
    #[serde(default = "default_references")]
    pub reference_methods: Vec<Method>,
    #[serde(default)]
    pub heatmap_includes_time: bool,
    #[serde(default)]
    pub parallel: bool,
    #[serde(default)]
    pub ingest: CsvOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// Alias used by the CLI: one JSON document carries both protocol and I/O options.
pub type RunConfig = BenchConfig;

fn default_trials() -> usize {
    100
}

fn default_repeats() -> usize {
    3
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

fn default_references() -> Vec<Method> {
    vec![Method::ForwardFill, Method::BackwardFill]
}

impl BenchConfig {
    pub fn new(
        master_seed: u64,
        trials: usize,
        methods: Vec<ImputerSpec>,
        plans: Vec<CorruptionPlan>,
        datasets: Vec<DatasetSpec>,
    ) -> Self {
        Self {
            master_seed,
            trials,
            methods,
            plans,
            datasets,
            repeats_for_timing: default_repeats(),
            histogram_bins: default_bins(),
            reference_methods: default_references(),
            heatmap_includes_time: false,
            parallel: false,
            ingest: CsvOptions::default(),
            output_dir: None,
        }
    }

    /// Parses JSON; errors name the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| ImputeError::Config {
            path: e.path().to_string(),
            reason: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => ImputeError::FileNotFound(path.to_path_buf()),
            _ => ImputeError::Io(e),
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let err = |path: String, reason: String| Err(ImputeError::Config { path, reason });
        if self.trials == 0 {
            return err("trials".into(), "must be at least 1".into());
        }
        if self.methods.is_empty() {
            return err("methods".into(), "at least one method is required".into());
        }
        if self.plans.is_empty() {
            return err("plans".into(), "at least one plan is required".into());
        }
        if self.datasets.is_empty() {
            return err("datasets".into(), "at least one dataset is required".into());
        }
        if self.repeats_for_timing == 0 {
            return err("repeats_for_timing".into(), "must be at least 1".into());
        }
        if self.histogram_bins == 0 {
            return err("histogram_bins".into(), "must be at least 1".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if let Err(e) = m.validate() {
                let path = match &e {
                    ImputeError::InvalidParam { key, .. } => format!("methods[{i}].params.{key}"),
                    _ => format!("methods[{i}]"),
                };
                return err(path, e.to_string());
            }
        }
        for (i, p) in self.plans.iter().enumerate() {
            if let Err(e) = p.validate() {
                return err(format!("plans[{i}]"), e.to_string());
            }
        }
        Ok(())
    }

    /// Checks every plan fits every loaded dataset before any trial runs.
    pub fn check_feasible(&self, datasets: &[(String, TimeSeries)]) -> Result<()> {
        for (label, series) in datasets {
            for (i, plan) in self.plans.iter().enumerate() {
                let n = series.len();
                let cap = feasible_mass(n, &plan.gap_mix, plan.placement);
                if plan.target_count(n) > cap {
                    return Err(ImputeError::Config {
                        path: format!("plans[{i}]"),
                        reason: format!(
                            "infeasible for dataset {label}: {} cells requested, at most {cap} placeable",
                            plan.target_count(n)
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "master_seed": 1,
        "trials": 2,
        "methods": [{"method": "kz"}, {"method": "ffill"}],
        "plans": [{"target_fraction": 0.1, "gap_mix": {"1": 1.0}}],
        "datasets": [{"kind": "ar1", "n": 100, "phi": 0.8}]
    }"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = BenchConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.trials, 2);
        assert_eq!(cfg.repeats_for_timing, 3);
        assert_eq!(cfg.methods[1].method, Method::ForwardFill);
        let back = BenchConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn zero_trials_names_the_field() {
        let text = MINIMAL.replace("\"trials\": 2", "\"trials\": 0");
        match BenchConfig::from_json(&text) {
            Err(ImputeError::Config { path, .. }) => assert_eq!(path, "trials"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_located() {
        let text = MINIMAL.replace("\"phi\": 0.8", "\"phi\": 0.8, \"bogus\": 1");
        match BenchConfig::from_json(&text) {
            Err(ImputeError::Config { path, reason }) => {
                assert!(path.starts_with("datasets[0]"), "{path}");
                assert!(reason.contains("bogus"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace(
            "{\"method\": \"kz\"}",
            "{\"method\": \"kz\", \"params\": {\"k\": 3}}",
        );
        match BenchConfig::from_json(&text) {
            Err(ImputeError::Config { path, .. }) => assert_eq!(path, "methods[0].params.k"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dataset_labels() {
        let d = DatasetSpec::Csv {
            path: "data/T1.csv".into(),
            column: "Wind".into(),
            name: None,
        };
        assert_eq!(d.label(), "T1.csv:Wind");
    }
}
