//! `awlab`: runs the verification suites, exports tables and sweeps
//! parameter grids.
//!
//! Exit codes: 0 when every gating check passes, 1 when a check fails,
//! 2 for usage, configuration and I/O errors.

mod config;
mod output;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use awlab_core::qcore::Precision;
use awlab_core::report::CheckReport;
use awlab_core::suite::{run_suite, Suite};
use awlab_core::tables::{build_table, TableKind};
use clap::{Args, Parser, Subcommand};

use crate::config::{env_precision, resolve, Overrides};
use crate::sweep::{render, run_points, write_dir, Grid};

#[derive(Parser)]
#[command(name = "awlab", version, about = "Numerical verification of rank-1 and rank-2 Askey-Wilson algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write a JSON report.
    Verify {
        /// aw3, uq, rank2 or all.
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Export a table as CSV and JSON (`<out>.csv`, `<out>.json`).
    Tables {
        /// qracah, bivariate, weights or stencil.
        #[arg(value_parser = parse_kind)]
        kind: TableKind,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a suite over a Cartesian parameter grid.
    Sweep {
        /// Grid file: `key = v1, v2, ...` lines.
        #[arg(long)]
        grid: PathBuf,
        /// Directory for per-point reports and `aggregate.json`; the
        /// aggregate goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_precision)]
        precision: Option<Precision>,
        /// Worker threads (default: one per core).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    /// Dimension parameter of the rank-1 suite.
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "N1")]
    n1: Option<usize>,
    #[arg(long = "N2")]
    n2: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    alpha0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha2: Option<f64>,
    /// Replaces every default gate tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// double or extended; AWLAB_PRECISION overrides it.
    #[arg(long, value_parser = parse_precision)]
    precision: Option<Precision>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Relative perturbation of one representation coefficient.
    #[arg(long, hide = true, num_args = 0..=1, default_missing_value = "1e-3", allow_hyphen_values = true)]
    corrupt: Option<f64>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            q: self.q,
            n: self.n,
            n1: self.n1,
            n2: self.n2,
            alpha: [self.alpha0, self.alpha1, self.alpha2],
            tol: self.tol,
            precision: self.precision,
            out: self.out.clone(),
            corrupt: self.corrupt,
        }
    }
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: awlab_core::error::AwError| e.to_string())
}

fn parse_kind(s: &str) -> Result<TableKind, String> {
    s.parse().map_err(|e: awlab_core::error::AwError| e.to_string())
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse().map_err(|e: awlab_core::error::AwError| e.to_string())
}

fn summarize(label: &str, checks: &[CheckReport]) -> bool {
    let failed: Vec<&CheckReport> = checks.iter().filter(|c| !c.pass).collect();
    let warnings = checks.iter().filter(|c| c.warning).count();
    eprintln!("{label}: {} checks, {} failed, {warnings} warning-class", checks.len(), failed.len());
    for c in &failed {
        eprintln!("  FAIL {}: residual {:.3e} > tolerance {:.1e} {}", c.check_id, c.residual, c.tolerance, c.notes);
    }
    failed.is_empty()
}

fn verify(suite: Suite, run: &RunArgs) -> Result<ExitCode> {
    let cfg = resolve(run.config.as_deref(), &run.overrides())?;
    let checks = run_suite(suite, &cfg.suite, cfg.precision)?;
    let doc = output::report_doc(suite, &cfg.suite, cfg.precision.as_str(), &checks);
    output::emit(cfg.out.as_deref(), &output::to_json(&doc)?)?;
    Ok(if summarize(suite.as_str(), &checks) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Strips a `.csv` or `.json` extension so both files share one stem.
fn stem(out: Option<&Path>, kind: TableKind) -> PathBuf {
    match out {
        Some(p) if matches!(p.extension().and_then(|e| e.to_str()), Some("csv" | "json")) => p.with_extension(""),
        Some(p) => p.to_path_buf(),
        None => PathBuf::from(kind.as_str()),
    }
}

fn with_suffix(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn tables(kind: TableKind, run: &RunArgs) -> Result<ExitCode> {
    let cfg = resolve(run.config.as_deref(), &run.overrides())?;
    let table = build_table(kind, &cfg.suite, cfg.precision)?;
    let base = stem(cfg.out.as_deref(), kind);
    let (csv_path, json_path) = (with_suffix(&base, "csv"), with_suffix(&base, "json"));
    output::emit(Some(&csv_path), &output::table_csv(&table, &cfg.suite)?)?;
    output::emit(Some(&json_path), &output::table_json(&table, &cfg.suite)?)?;
    eprintln!("{}: {} rows written to {} and {}", kind.as_str(), table.values.len(), csv_path.display(), json_path.display());
    Ok(ExitCode::SUCCESS)
}

fn sweep_cmd(grid_path: &Path, out: Option<&Path>, precision: Option<Precision>, jobs: Option<usize>) -> Result<ExitCode> {
    let text = std::fs::read_to_string(grid_path).with_context(|| format!("reading grid {}", grid_path.display()))?;
    let grid = Grid::parse(&text).with_context(|| format!("in grid {}", grid_path.display()))?;
    let precision = env_precision()?.or(precision).or(grid.precision).unwrap_or(Precision::Double);
    let points = grid.points();
    let results = run_points(grid.suite, &points, precision, jobs)?;
    let outcome = render(&grid, precision, &points, &results)?;
    match out {
        Some(dir) => write_dir(dir, &outcome)?,
        None => output::emit(None, &outcome.aggregate_json)?,
    }
    let invalid = results.iter().filter(|r| r.is_err()).count();
    let failed = results.iter().filter(|r| matches!(r, Ok(c) if c.iter().any(|x| !x.pass))).count();
    eprintln!("sweep: {} points, {failed} with failing checks, {invalid} invalid", points.len());
    for (i, r) in results.iter().enumerate() {
        if let Err(e) = r {
            eprintln!("  point {i} invalid: {e}");
        }
    }
    Ok(if outcome.all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify { suite, run } => verify(*suite, run),
        Command::Tables { kind, run } => tables(*kind, run),
        Command::Sweep { grid, out, precision, jobs } => sweep_cmd(grid, out.as_deref(), *precision, *jobs),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
