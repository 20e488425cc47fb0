// SPDX-License-Identifier: MIT OR Apache-2.0

//! `kzimpute`: impute, corrupt, bench and report from the command line.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 data error,
//! 3 internal invariant violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kzimpute_core::baselines::{impute, ImputerSpec, Method};
use kzimpute_core::bench::run_bench_at;
use kzimpute_core::config::BenchConfig;
use kzimpute_core::corruption::{corrupt, CorruptionPlan, Placement};
use kzimpute_core::error::{ImputeError, Result};
use kzimpute_core::io::{
    fmt_opt, fmt_sig, read_truth, write_truth, ColumnRef, CsvOptions, CsvTable,
};
use kzimpute_core::metrics::{score, DEFAULT_BINS, METRIC_NAMES};
use kzimpute_core::report::{self, RenderFormat};
use kzimpute_core::series::TimeSeries;

#[derive(Parser)]
#[command(
    name = "kzimpute",
    version,
    about = "Position-aware gap imputation for time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fill gaps in one column of a CSV file.
    Impute(ImputeArgs),
    /// Blank cells of a complete column at random and write the truth sidecar.
    Corrupt(CorruptArgs),
    /// Run the benchmark described by a JSON config.
    Bench(BenchArgs),
    /// Re-render summaries of a bench directory from its per-trial rows.
    Report(ReportArgs),
    /// Score an imputed column against a truth sidecar.
    Score(ScoreArgs),
}

#[derive(Args)]
struct Ingest {
    #[arg(long)]
    input: PathBuf,
    /// Header name, or 0-based position.
    #[arg(long)]
    column: String,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    #[arg(long)]
    no_header: bool,
    /// Extra tokens to read as missing, on top of NaN, nan, NA and the empty field.
    #[arg(long = "missing-token")]
    missing_tokens: Vec<String>,
}

impl Ingest {
    fn options(&self) -> CsvOptions {
        let mut opts = CsvOptions {
            delimiter: self.delimiter,
            has_header: !self.no_header,
            ..CsvOptions::default()
        };
        opts.missing_tokens
            .extend(self.missing_tokens.iter().cloned());
        opts
    }

    fn load(&self) -> Result<(CsvTable, usize, TimeSeries, CsvOptions)> {
        let opts = self.options();
        let table = CsvTable::read(&self.input, &opts)?;
        let column = ColumnRef::from(self.column.as_str());
        let col = table.column_index(&column)?;
        let series = table.series(&column, &opts)?;
        Ok((table, col, series, opts))
    }
}

#[derive(Args)]
struct ImputeArgs {
    #[command(flatten)]
    ingest: Ingest,
    #[arg(long, default_value = "kz")]
    method: Method,
    /// Method parameter as key=value, e.g. `--param k=5`.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Shorthand for `--param max_gap_size=N` with the kz method.
    #[arg(long)]
    max_gap_size: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CorruptArgs {
    #[command(flatten)]
    ingest: Ingest,
    /// JSON corruption plan; replaces the plan flags below.
    #[arg(long, conflicts_with_all = ["fraction", "gap_mix", "placement", "seed"])]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, required_unless_present = "config")]
    fraction: Option<f64>,
    /// Gap-size weights over gap count, e.g. `1:1,2:0.5`.
    #[arg(long, value_parser = parse_mix)]
    gap_mix: Option<GapMix>,
    #[arg(long, value_parser = parse_placement)]
    placement: Option<Placement>,
    #[arg(long)]
    out: PathBuf,
    /// Truth sidecar path; defaults to `<out>.truth.csv`.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    dir: PathBuf,
    /// md, csv or all.
    #[arg(long, default_value = "all")]
    format: String,
}

#[derive(Args)]
struct ScoreArgs {
    /// Imputed CSV.
    #[command(flatten)]
    ingest: Ingest,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// Print the full-precision metric report as JSON.
    #[arg(long)]
    json: bool,
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected key=value")?;
    let v = v.trim().parse::<f64>().map_err(|e| format!("{v}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Clone)]
struct GapMix(Vec<(usize, f64)>);

fn parse_mix(s: &str) -> std::result::Result<GapMix, String> {
    s.split(',')
        .map(|part| {
            let (size, weight) = part.split_once(':').unwrap_or((part, "1"));
            let size = size
                .trim()
                .parse::<usize>()
                .map_err(|e| format!("gap size {size:?}: {e}"))?;
            let weight = weight
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("weight {weight:?}: {e}"))?;
            Ok((size, weight))
        })
        .collect::<std::result::Result<_, _>>()
        .map(GapMix)
}

fn parse_placement(s: &str) -> std::result::Result<Placement, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|_| {
        format!("unknown placement {s:?} (anywhere, left_only, middle_only, right_only)")
    })
}

fn exit_code(e: &ImputeError) -> u8 {
    use ImputeError::*;
    match e.root() {
        Config { .. }
        | InvalidParam { .. }
        | InvalidPlan(_)
        | InfeasiblePlan(_)
        | InvalidInput(_) => 1,
        Invariant(_) => 3,
        _ => 2,
    }
}

fn cmd_impute(args: &ImputeArgs) -> Result<()> {
    let (table, col, series, opts) = args.ingest.load()?;
    let mut spec = ImputerSpec::new(args.method);
    for (k, v) in &args.params {
        spec = spec.with_param(k, *v);
    }
    if let Some(g) = args.max_gap_size {
        if args.method != Method::Kz {
            return Err(ImputeError::InvalidInput(
                "--max-gap-size only applies to --method kz".into(),
            ));
        }
        spec = spec.with_param("max_gap_size", g as f64);
    }
    let outcome = impute(&spec, &series)?;
    let mut out = table.with_column(col, &series, &outcome.series);
    let mut flags = vec!["0".to_string(); series.len()];
    for &(i, _) in &outcome.filled {
        flags[i] = "1".into();
    }
    let name = table
        .headers
        .as_ref()
        .map_or_else(|| format!("column_{col}"), |h| h[col].trim().to_string());
    out.push_column(&format!("{name}_imputed"), flags);
    out.write(&args.out, &opts)?;
    println!(
        "method={} filled={} skipped_gaps={} skipped_cells={}",
        spec.label(),
        outcome.filled.len(),
        outcome.skipped.len(),
        outcome.skipped_cells()
    );
    for note in &outcome.notes {
        println!(
            "note: {}",
            serde_json::to_string(note).expect("note serialises")
        );
    }
    Ok(())
}

fn read_plan(path: &Path) -> Result<CorruptionPlan> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ImputeError::FileNotFound(path.to_path_buf()),
        _ => ImputeError::Io(e),
    })?;
    serde_json::from_str(&text).map_err(|e| ImputeError::Config {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn cmd_corrupt(args: &CorruptArgs) -> Result<()> {
    let plan = match &args.config {
        Some(p) => read_plan(p)?,
        None => {
            let mix = args.gap_mix.clone().map_or_else(|| vec![(1, 1.0)], |m| m.0);
            CorruptionPlan::new(
                args.seed.unwrap_or(0),
                args.fraction.expect("clap enforces --fraction"),
                mix.into_iter().collect(),
            )
            .with_placement(args.placement.unwrap_or_default())
        }
    };
    let (table, col, series, opts) = args.ingest.load()?;
    let pair = corrupt(&series, &plan)?;
    table
        .with_column(col, &series, &pair.corrupted)
        .write(&args.out, &opts)?;
    let truth_path = args.truth.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".truth.csv");
        p.into()
    });
    write_truth(&truth_path, &pair.truth)?;
    println!(
        "blanked={} gaps={} seed={} truth={}",
        pair.truth.len(),
        pair.gaps.len(),
        plan.seed,
        truth_path.display()
    );
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let mut config = BenchConfig::from_path(&args.config)?;
    let base = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let dir = match (&args.out, &config.output_dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) if d.is_relative() => base.join(d),
        (None, Some(d)) => d.clone(),
        (None, None) => PathBuf::from("bench-out"),
    };
    let report = run_bench_at(&config, &base)?;
    // relative dataset paths must still resolve when the echo is re-read elsewhere
    for d in &mut config.datasets {
        if let kzimpute_core::config::DatasetSpec::Csv { path, .. } = d {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
    report::write_bench_dir(&dir, &report, &config)?;
    println!(
        "trial_rows={} aggregates={} dir={}",
        report.rows.len(),
        report.aggregates.len(),
        dir.display()
    );
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let format: RenderFormat = args.format.parse()?;
    let report = report::rerender(&args.dir, format)?;
    println!(
        "trial_rows={} aggregates={} dir={}",
        report.rows.len(),
        report.aggregates.len(),
        args.dir.display()
    );
    Ok(())
}

fn cmd_score(args: &ScoreArgs) -> Result<()> {
    let (_, _, imputed, _) = args.ingest.load()?;
    let truth = read_truth(&args.truth)?;
    // the original series is the imputed one with the blanked cells restored
    let mut original = imputed.values().to_vec();
    for &(i, v) in &truth {
        let slot = original.get_mut(i).ok_or_else(|| {
            ImputeError::InvalidInput(format!(
                "truth index {i} beyond series length {}",
                imputed.len()
            ))
        })?;
        *slot = v;
    }
    let original = TimeSeries::new(original)?;
    let outcome = kzimpute_core::outcome::ImputationOutcome {
        filled: truth
            .iter()
            .filter_map(|&(i, _)| imputed.get(i).map(|v| (i, v)))
            .collect(),
        series: imputed,
        skipped: Vec::new(),
        notes: Vec::new(),
    };
    let r = score(&original, &truth, &outcome, 0.0, args.bins)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&r).expect("report serialises")
        );
    } else {
        for m in METRIC_NAMES.iter().filter(|m| **m != "Time") {
            println!("{m},{}", fmt_opt(r.get(m)));
        }
        println!("coverage,{}", fmt_sig(r.coverage));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Impute(a) => cmd_impute(a),
        Command::Corrupt(a) => cmd_corrupt(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Report(a) => cmd_report(a),
        Command::Score(a) => cmd_score(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
