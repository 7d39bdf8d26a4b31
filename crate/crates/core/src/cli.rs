//! Command-line entry point. Exit codes: 0 success, 1 domain or data error,
//! 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use crate::descriptive::stats_to_csv;
use crate::heatmap::{export_grid, gaussian_blur, histogram2d, AxisLabels};
use crate::indexes::inflation_rate;
use crate::ingest::{ingest, save_snapshot, IngestOptions, Source};
use crate::io::write_atomic;
use crate::model::{ItemId, Snapshot};
use crate::report::{self, prepare, resolve_input, Config, Input, SOURCE_ENV};
use crate::stationarity::{adf_rows_to_csv, adf_test};
use crate::transforms::first_difference;

#[derive(Debug, Parser)]
#[command(name = "vecon", version, about = "Virtual economy monitoring toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fetch raw documents, align them to a window and save a snapshot.
    Ingest(IngestArgs),
    /// Per-item descriptive statistics as CSV.
    Stats(SnapshotArgs),
    /// Quartile and top-100 index series with their inflation rates.
    Index(SnapshotArgs),
    /// ADF tests on first-differenced indexes, or on a single series.
    Adf(AdfArgs),
    /// Blurred 2-D density heatmaps of per-item statistics.
    Heatmap(HeatmapArgs),
    /// Full health report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Endpoint URL or fixture directory.
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated item ids.
    #[arg(long, value_delimiter = ',')]
    items: Option<Vec<u32>>,
    /// Volume table CSV (item_id,volume).
    #[arg(long)]
    volumes: Option<PathBuf>,
    /// Snapshot directory to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SnapshotArgs {
    #[arg(long)]
    snapshot: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file or directory; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AdfArgs {
    #[arg(long, conflicts_with = "series", required_unless_present = "series")]
    snapshot: Option<PathBuf>,
    /// Text file with one value per line.
    #[arg(long)]
    series: Option<PathBuf>,
    #[arg(long)]
    max_lag: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HeatmapArgs {
    #[arg(long)]
    snapshot: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    snapshot: Option<PathBuf>,
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn load_config(path: Option<&Path>) -> anyhow::Result<Config> {
    Ok(match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    })
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => {
            write_atomic(p, text.as_bytes()).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Index(a) => cmd_index(a),
        Command::Adf(a) => cmd_adf(a),
        Command::Heatmap(a) => cmd_heatmap(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn cmd_ingest(a: IngestArgs) -> anyhow::Result<()> {
    let mut config = load_config(a.config.as_deref())?;
    if let Some(items) = a.items {
        config.items = Some(items);
    }
    if a.volumes.is_some() {
        config.volume_table = a.volumes;
    }
    config.validate()?;
    let source = a
        .source
        .or_else(|| config.source.clone())
        .or_else(|| std::env::var(SOURCE_ENV).ok())
        .ok_or(report::ReportError::NoSource)?;
    let opts = IngestOptions {
        window: config.explicit_window()?,
        window_days: config.window_days(),
        min_coverage: config.min_coverage,
        bond: config.bond,
        volume_table: config.volume_table.clone(),
        policy: config.policy(),
    };
    let ids: Option<Vec<ItemId>> = config.item_ids();
    let outcome = ingest(&Source::parse(&source), ids.as_deref(), &opts)?;
    for (id, e) in &outcome.rejected {
        eprintln!("warning: item {id} dropped: {e}");
    }
    save_snapshot(&outcome.snapshot, &a.out)?;
    eprintln!(
        "saved {} items to {}",
        outcome.snapshot.item_count(),
        a.out.display()
    );
    Ok(())
}

fn open_snapshot(dir: &Path, config: &Config) -> anyhow::Result<Snapshot> {
    let (snap, _) = report::load_input(&Input::Snapshot(dir.to_path_buf()), config)?;
    Ok(snap)
}

fn cmd_stats(a: SnapshotArgs) -> anyhow::Result<()> {
    let config = load_config(a.config.as_deref())?;
    let prepared = prepare(&open_snapshot(&a.snapshot, &config)?)?;
    if !prepared.exclusion.excluded_ids.is_empty() {
        eprintln!(
            "excluded {} static items",
            prepared.exclusion.excluded_ids.len()
        );
    }
    emit(a.out.as_deref(), &stats_to_csv(&prepared.stats))
}

fn cmd_index(a: SnapshotArgs) -> anyhow::Result<()> {
    let config = load_config(a.config.as_deref())?;
    let prepared = prepare(&open_snapshot(&a.snapshot, &config)?)?;
    let mut summary = String::from("label,weighting,members,inflation_pct\n");
    for ix in &prepared.indexes {
        summary.push_str(&format!(
            "{},{},{},{}\n",
            ix.label,
            ix.weighting.as_str(),
            ix.membership.len(),
            inflation_rate(ix)?
        ));
    }
    match a.out {
        Some(dir) => {
            for ix in &prepared.indexes {
                let path = dir.join(format!("{}.csv", ix.label));
                emit(Some(&path), &ix.to_csv())?;
            }
            emit(Some(&dir.join("summary.csv")), &summary)
        }
        None => emit(None, &summary),
    }
}

fn read_series(path: &Path) -> anyhow::Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) => bail!("{}:{}: not a number: {line:?}", path.display(), i + 1),
        }
    }
    Ok(values)
}

fn cmd_adf(a: AdfArgs) -> anyhow::Result<()> {
    let csv = match (a.snapshot, a.series) {
        (_, Some(path)) => {
            let values = read_series(&path)?;
            let result = adf_test(&values, a.max_lag)?;
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "series".into());
            adf_rows_to_csv([(label.as_str(), &result)])
        }
        (Some(dir), None) => {
            let prepared = prepare(&open_snapshot(&dir, &Config::default())?)?;
            let mut results = Vec::with_capacity(prepared.indexes.len());
            for ix in &prepared.indexes {
                let diffs = first_difference(&ix.values_f64())?;
                let r = adf_test(&diffs, a.max_lag)
                    .with_context(|| format!("ADF on index {}", ix.label))?;
                results.push((ix.label.as_str(), r));
            }
            adf_rows_to_csv(results.iter().map(|(l, r)| (*l, r)))
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    emit(a.out.as_deref(), &csv)
}

fn cmd_heatmap(a: HeatmapArgs) -> anyhow::Result<()> {
    let mut config = load_config(a.config.as_deref())?;
    if let Some(b) = a.bins {
        config.heatmap_bins = b;
    }
    if let Some(s) = a.sigma {
        config.heatmap_sigma = s;
    }
    config.validate()?;
    let prepared = prepare(&open_snapshot(&a.snapshot, &config)?)?;
    for (name, x, y, f) in report::HEATMAPS {
        let points: Vec<(f64, f64)> = prepared.stats.iter().map(f).collect();
        let grid = gaussian_blur(
            &histogram2d(&points, config.heatmap_bins)?,
            config.heatmap_sigma,
        )?;
        let files = export_grid(&grid, AxisLabels { name, x, y }, &a.out.join(name))?;
        eprintln!("wrote {}", files.csv.display());
    }
    Ok(())
}

fn cmd_report(a: ReportArgs) -> anyhow::Result<()> {
    let config = load_config(a.config.as_deref())?;
    let input = resolve_input(
        a.snapshot.as_deref(),
        a.source.as_deref(),
        &config,
        std::env::var(SOURCE_ENV).ok(),
    )?;
    let report = report::run_report(&config, &input, &a.out)?;
    for ix in report.indexes() {
        if ix.alert != report::AlertLevel::None {
            eprintln!(
                "alert: {} index inflation {}% ({})",
                ix.label,
                ix.inflation_pct_display,
                ix.alert.as_str()
            );
        }
    }
    eprintln!("wrote {}", a.out.join("report.json").display());
    Ok(())
}
