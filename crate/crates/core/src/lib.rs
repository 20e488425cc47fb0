// SPDX-License-Identifier: MIT OR Apache-2.0

//! Gap-aware time-series imputation with a reproducible benchmark harness.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod config;
pub mod corruption;
pub mod error;
pub mod io;
pub mod kz;
pub mod metrics;
pub mod outcome;
pub mod report;
pub mod series;
pub mod spline;
pub mod synthetic;

pub use baselines::{impute, ImputerSpec, Method};
pub use bench::{improvement_pct, normalize_for_heatmap, run_bench, run_bench_at, BenchReport};
pub use config::{BenchConfig, DatasetSpec, RunConfig};
pub use corruption::{
    corrupt, derive_seed, feasible_mass, CorruptedPair, CorruptionPlan, Placement,
};
pub use error::{ImputeError, Result};
pub use io::{ingest_csv, ColumnRef, CsvOptions};
pub use kz::{kz_impute, KzConfig};
pub use metrics::{score, MetricReport};
pub use outcome::{FillNote, ImputationOutcome};
pub use series::{scan_gaps, GapPosition, GapSegment, TimeSeries};
