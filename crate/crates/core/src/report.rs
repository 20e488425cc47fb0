// SPDX-License-Identifier: MIT OR Apache-2.0

//! On-disk report artifacts.
//!
//! A bench directory holds `report.csv` (per-trial rows at full precision),
//! `summary.csv`, `summary.md`, `heatmap.csv` and a `config.json` echo. The
//! three summaries are pure functions of the first and last, so they can be
//! re-rendered without re-running anything.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::bench::{BenchReport, TrialRow, METRIC_COUNT};
use crate::config::BenchConfig;
use crate::error::{ImputeError, Result};
use crate::io::{fmt_exact, fmt_opt, fmt_sig};
use crate::metrics::METRIC_NAMES;

pub const REPORT_CSV: &str = "report.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const SUMMARY_MD: &str = "summary.md";
pub const HEATMAP_CSV: &str = "heatmap.csv";
pub const CONFIG_JSON: &str = "config.json";

const ROW_PREFIX: [&str; 8] = [
    "dataset_index",
    "dataset",
    "plan_index",
    "plan",
    "trial",
    "seed",
    "method_index",
    "method",
];
const ROW_SUFFIX: [&str; 3] = ["evaluated_points", "mape_skipped_zeros", "coverage"];

/// Which summaries `rerender` rewrites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Markdown,
    Csv,
    All,
}

impl std::str::FromStr for RenderFormat {
    type Err = ImputeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "md" | "markdown" => Ok(Self::Markdown),
            "csv" => Ok(Self::Csv),
            "all" => Ok(Self::All),
            other => Err(ImputeError::InvalidInput(format!(
                "unknown report format {other:?} (expected md, csv or all)"
            ))),
        }
    }
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| ImputeError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn exact_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".into(), fmt_exact)
}

pub fn render_trials_csv(rows: &[TrialRow]) -> Result<String> {
    let header: Vec<String> = ROW_PREFIX
        .iter()
        .chain(METRIC_NAMES.iter())
        .chain(ROW_SUFFIX.iter())
        .map(|s| s.to_string())
        .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells = vec![
                r.dataset_index.to_string(),
                r.dataset.clone(),
                r.plan_index.to_string(),
                r.plan.clone(),
                r.trial.to_string(),
                r.seed.to_string(),
                r.method_index.to_string(),
                r.method.clone(),
            ];
            cells.extend(r.metrics.iter().map(|&m| exact_opt(m)));
            cells.push(r.evaluated_points.to_string());
            cells.push(r.mape_skipped_zeros.to_string());
            cells.push(fmt_exact(r.coverage));
            cells
        })
        .collect();
    csv_string(&header, &body)
}

pub fn parse_trials_csv(text: &str) -> Result<Vec<TrialRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let expected = ROW_PREFIX.len() + METRIC_COUNT + ROW_SUFFIX.len();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() != expected {
            return Err(ImputeError::InvalidInput(format!(
                "report row {row}: expected {expected} fields, found {}",
                record.len()
            )));
        }
        let int = |j: usize| -> Result<u64> {
            record[j].parse().map_err(|_| ImputeError::ParseError {
                row,
                token: record[j].to_string(),
            })
        };
        let float = |j: usize| -> Result<f64> {
            record[j].parse().map_err(|_| ImputeError::ParseError {
                row,
                token: record[j].to_string(),
            })
        };
        let mut metrics = [None; METRIC_COUNT];
        for (m, slot) in metrics.iter_mut().enumerate() {
            let v = float(ROW_PREFIX.len() + m)?;
            *slot = (!v.is_nan()).then_some(v);
        }
        let s = ROW_PREFIX.len() + METRIC_COUNT;
        rows.push(TrialRow {
            dataset_index: int(0)? as usize,
            dataset: record[1].to_string(),
            plan_index: int(2)? as usize,
            plan: record[3].to_string(),
            trial: int(4)? as usize,
            seed: int(5)?,
            method_index: int(6)? as usize,
            method: record[7].to_string(),
            metrics,
            evaluated_points: int(s)? as usize,
            mape_skipped_zeros: int(s + 1)? as usize,
            coverage: float(s + 2)?,
        });
    }
    Ok(rows)
}

/// Aggregates without Time, so the file is identical across runs.
pub fn render_summary_csv(report: &BenchReport) -> Result<String> {
    let metrics: Vec<(usize, &str)> = METRIC_NAMES
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, m)| *m != "Time")
        .collect();
    let mut header: Vec<String> = ["dataset", "plan", "method", "trials", "coverage"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for (_, m) in &metrics {
        header.push(format!("{m}_mean"));
        header.push(format!("{m}_std"));
    }
    let body: Vec<Vec<String>> = report
        .aggregates
        .iter()
        .map(|a| {
            let mut cells = vec![
                a.dataset.clone(),
                a.plan.clone(),
                a.method.clone(),
                a.trials.to_string(),
                fmt_sig(a.coverage_mean),
            ];
            for &(i, _) in &metrics {
                cells.push(fmt_opt(a.mean[i]));
                cells.push(fmt_opt(a.std[i]));
            }
            cells
        })
        .collect();
    csv_string(&header, &body)
}

pub fn render_heatmap_csv(report: &BenchReport) -> Result<String> {
    let mut header: Vec<String> = vec!["dataset".into(), "plan".into(), "method".into()];
    header.extend(report.heatmap_metrics.iter().cloned());
    let body: Vec<Vec<String>> = report
        .heatmap
        .iter()
        .map(|h| {
            let mut cells = vec![h.dataset.clone(), h.plan.clone(), h.method.clone()];
            cells.extend(h.values.iter().map(|&v| fmt_opt(v)));
            cells
        })
        .collect();
    csv_string(&header, &body)
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Markdown summary: one method × metric table per (dataset, plan), then
/// MAE improvements and run metadata.
pub fn render_summary_md(report: &BenchReport) -> String {
    let mut out = String::new();
    let meta = &report.metadata;
    let _ = writeln!(out, "# Imputation benchmark\n");
    let _ = writeln!(
        out,
        "{} trials per dataset and plan. Cells are means over trials; Time is median seconds per call.\n",
        meta.trials
    );
    let mut current: Option<(usize, usize)> = None;
    for a in &report.aggregates {
        if current != Some((a.dataset_index, a.plan_index)) {
            current = Some((a.dataset_index, a.plan_index));
            let _ = writeln!(out, "## {} / {}\n", md_cell(&a.dataset), md_cell(&a.plan));
            let _ = writeln!(out, "| Method | {} | Coverage |", METRIC_NAMES.join(" | "));
            let _ = writeln!(out, "|---{}|---|", "|---:".repeat(METRIC_COUNT));
        }
        let cells: Vec<String> = a.mean.iter().map(|&v| fmt_opt(v)).collect();
        let _ = writeln!(
            out,
            "| {} | {} | {} |",
            md_cell(&a.method),
            cells.join(" | "),
            fmt_sig(a.coverage_mean)
        );
        let last_in_block = report
            .aggregates
            .iter()
            .skip_while(|x| !std::ptr::eq(*x, a))
            .nth(1)
            .map_or(true, |n| {
                (n.dataset_index, n.plan_index) != (a.dataset_index, a.plan_index)
            });
        if last_in_block {
            out.push('\n');
        }
    }
    if !report.improvements.is_empty() {
        let _ = writeln!(out, "## MAE improvement (%)\n");
        let _ = writeln!(
            out,
            "Positive means the candidate's mean MAE is below the reference's.\n"
        );
        let _ = writeln!(out, "| Dataset | Plan | Reference | Candidate | Reference MAE | Candidate MAE | Improvement |");
        let _ = writeln!(out, "|---|---|---|---|---:|---:|---:|");
        for i in &report.improvements {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} |",
                md_cell(&i.dataset),
                md_cell(&i.plan),
                md_cell(&i.reference),
                md_cell(&i.candidate),
                fmt_sig(i.reference_mae),
                fmt_sig(i.candidate_mae),
                fmt_opt(i.pct)
            );
        }
        out.push('\n');
    }
    let _ = writeln!(out, "## Run metadata\n");
    let _ = writeln!(out, "- master seed: {}", meta.master_seed);
    let _ = writeln!(out, "- generator: {}", meta.generator);
    let _ = writeln!(out, "- seeds: {}", meta.seed_scheme);
    for d in &meta.decisions {
        let _ = writeln!(out, "- {d}");
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| ImputeError::Io(e).context(path.display().to_string()))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ImputeError::FileNotFound(path.to_path_buf()),
        _ => ImputeError::Io(e),
    })
}

fn write_summaries(dir: &Path, report: &BenchReport, format: RenderFormat) -> Result<()> {
    if matches!(format, RenderFormat::Csv | RenderFormat::All) {
        write_file(&dir.join(SUMMARY_CSV), &render_summary_csv(report)?)?;
        write_file(&dir.join(HEATMAP_CSV), &render_heatmap_csv(report)?)?;
    }
    if matches!(format, RenderFormat::Markdown | RenderFormat::All) {
        write_file(&dir.join(SUMMARY_MD), &render_summary_md(report))?;
    }
    Ok(())
}

/// Writes all five artifacts into `dir`, creating it if needed.
pub fn write_bench_dir(dir: &Path, report: &BenchReport, config: &BenchConfig) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_file(&dir.join(CONFIG_JSON), &config.to_json())?;
    write_file(&dir.join(REPORT_CSV), &render_trials_csv(&report.rows)?)?;
    write_summaries(dir, report, RenderFormat::All)
}

/// Rebuilds the report from `report.csv` and `config.json` in `dir`.
pub fn load_bench_dir(dir: &Path) -> Result<(BenchReport, BenchConfig)> {
    let config = BenchConfig::from_json(&read_file(&dir.join(CONFIG_JSON))?)
        .map_err(|e| e.context(dir.join(CONFIG_JSON).display().to_string()))?;
    let rows = parse_trials_csv(&read_file(&dir.join(REPORT_CSV))?)
        .map_err(|e| e.context(dir.join(REPORT_CSV).display().to_string()))?;
    Ok((BenchReport::from_rows(rows, &config), config))
}

/// Re-renders summaries from persisted rows without re-running trials.
pub fn rerender(dir: &Path, format: RenderFormat) -> Result<BenchReport> {
    let (report, _) = load_bench_dir(dir)?;
    write_summaries(dir, &report, format)?;
    Ok(report)
}
