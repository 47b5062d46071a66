//! Command-line driver for the stationary chain calculations.
//!
//! Subcommands: `steady` (one configuration → JSON report), `sweep`
//! (parameter grid → CSV), `figure` (named preset scans), `correlate`
//! (current-autocorrelation trace). Exit codes: 0 success, 2 invalid input,
//! 3 numerical failure.

mod figures;
mod observables;
mod sweep;

use clap::{Parser, Subcommand};
use observables::{columns, evaluate, MeasureContext, Observable};
use rayon::prelude::*;
use serde_json::json;
use std::path::{Path, PathBuf};
use sweep::{format_float, run_sweep, write_csv, SweepSpec};
use trichain::{model, transport, Engine};

#[derive(Debug)]
pub enum CliError {
    /// Bad input: malformed files, unknown names, invalid parameters.
    Validation(String),
    /// The physics failed: unstable configuration, quadrature breakdown.
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "trichain",
    about = "Stationary state, energy currents and quantum correlations of a damped three-oscillator chain",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and write a JSON report.
    Steady {
        /// Configuration document (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output path for the JSON report.
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated observables, e.g. "J,E_N(L,R),T33".
        #[arg(long)]
        observables: Option<String>,
        /// Lag grid for K_JJ (comma list or start:stop:n).
        #[arg(long)]
        tau_grid: Option<String>,
        /// Criterion data overrides (repeatable; κ read from the file).
        #[arg(long)]
        criterion_spec: Vec<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run a sweep specification and write one CSV row per grid point.
    Sweep {
        /// Sweep specification (JSON with base, axes, outputs).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Lag grid for K_JJ outputs (overrides the sweep file's tau_grid).
        #[arg(long)]
        tau_grid: Option<String>,
        #[arg(long)]
        criterion_spec: Vec<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run a named preset scan (fig1, fig2, fig3, fig31, fig4, fig5).
    Figure {
        /// Preset name.
        name: String,
        /// Directory for the CSV/dat outputs.
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        criterion_spec: Vec<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Tabulate the total-current autocorrelation K_JJ(τ).
    Correlate {
        #[arg(long)]
        config: PathBuf,
        /// Lags: comma list "0,0.5,1" or range "start:stop:n".
        #[arg(long)]
        tau_grid: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn parse_tau_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: String| CliError::Validation(m);
    let values: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("tau grid `{s}` should be start:stop:n")));
        }
        let start: f64 = parts[0].parse().map_err(|_| bad(format!("bad start in `{s}`")))?;
        let stop: f64 = parts[1].parse().map_err(|_| bad(format!("bad stop in `{s}`")))?;
        let n: usize = parts[2].parse().map_err(|_| bad(format!("bad count in `{s}`")))?;
        if n == 0 {
            return Err(bad("tau grid needs at least one point".into()));
        }
        if n == 1 {
            vec![start]
        } else {
            (0..n)
                .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                .collect()
        }
    } else {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(format!("tau grid `{s}` has a non-numeric entry")))?
    };
    if values.is_empty() {
        return Err(bad("tau grid is empty".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad("tau grid has non-finite entries".into()));
    }
    let mut seen = Vec::new();
    let mut deduped = Vec::new();
    for v in values {
        if seen.contains(&v.to_bits()) {
            eprintln!("warning: duplicate tau value {v} dropped");
        } else {
            seen.push(v.to_bits());
            deduped.push(v);
        }
    }
    Ok(deduped)
}

fn build_context(seed: u64, overrides: &[PathBuf]) -> Result<MeasureContext, CliError> {
    let mut ctx = MeasureContext::with_seed(seed);
    for path in overrides {
        ctx.load_override(path).map_err(CliError::Validation)?;
    }
    Ok(ctx)
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn cmd_steady(
    config: &Path,
    out: &Path,
    observables: Option<&str>,
    tau_grid: Option<&str>,
    criterion_spec: &[PathBuf],
    seed: u64,
) -> Result<(), CliError> {
    let raw = read_to_string(config)?;
    let cfg = model::validate(&raw).map_err(|e| CliError::Validation(e.to_string()))?;
    let obs = match observables {
        Some(list) => Observable::parse_list(list).map_err(CliError::Validation)?,
        None => vec![Observable::CurrentTotal, Observable::InteractionEnergy],
    };
    let taus = match tau_grid {
        Some(s) => parse_tau_grid(s)?,
        None => vec![0.0],
    };
    let ctx = build_context(seed, criterion_spec)?;

    let engine = Engine::new(cfg.clone()).map_err(|e| CliError::Numerical(e.to_string()))?;
    let cov = engine
        .covariance()
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut observed = serde_json::Map::new();
    for ob in &obs {
        let vals = evaluate(ob, &engine, &cov, &taus, &ctx).map_err(CliError::Numerical)?;
        for (name, v) in columns(ob, &taus).into_iter().zip(vals) {
            observed.insert(name, json!(v));
        }
    }
    let min_eig = cov.min_uncertainty_eigenvalue();
    let rows: Vec<Vec<f64>> = (0..6)
        .map(|r| (0..6).map(|c| cov.matrix()[(r, c)]).collect())
        .collect();
    let report = json!({
        "config": cfg,
        "stationarity": engine.report(),
        "covariance": {
            "ordering": ["x_L", "x_C", "x_R", "p_L", "p_C", "p_R"],
            "rows": rows,
        },
        "quad_error": cov.max_abs_error,
        "min_uncertainty_eigenvalue": min_eig,
        "physical": min_eig > -1e-9,
        "observables": observed,
    });
    std::fs::write(out, serde_json::to_string_pretty(&report).unwrap() + "\n")
        .map_err(|e| CliError::Validation(format!("write {}: {e}", out.display())))?;
    Ok(())
}

fn cmd_sweep(
    config: &Path,
    out: &Path,
    jobs: Option<usize>,
    tau_grid: Option<&str>,
    criterion_spec: &[PathBuf],
    seed: u64,
) -> Result<(), CliError> {
    let raw = read_to_string(config)?;
    let mut spec: SweepSpec =
        serde_json::from_str(&raw).map_err(|e| CliError::Validation(format!("sweep spec: {e}")))?;
    if let Some(s) = tau_grid {
        spec.tau_grid = parse_tau_grid(s)?;
    }
    // Surface bad override files before any work happens.
    build_context(seed, criterion_spec)?;
    let overrides = criterion_spec.to_vec();
    let result = run_sweep(&spec, jobs, seed, &move |s| {
        let mut ctx = MeasureContext::with_seed(s);
        for p in &overrides {
            let _ = ctx.load_override(p); // validated above
        }
        ctx
    })?;
    write_csv(out, &result)?;
    if result.successes == 0 {
        return Err(CliError::Numerical(format!(
            "all {} grid points failed; see the error column in {}",
            result.rows.len(),
            out.display()
        )));
    }
    eprintln!(
        "sweep: {}/{} points ok -> {}",
        result.successes,
        result.rows.len(),
        out.display()
    );
    Ok(())
}

fn cmd_correlate(
    config: &Path,
    tau_grid: &str,
    out: &Path,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    let raw = read_to_string(config)?;
    let cfg = model::validate(&raw).map_err(|e| CliError::Validation(e.to_string()))?;
    let taus = parse_tau_grid(tau_grid)?;
    let engine = Engine::new(cfg).map_err(|e| CliError::Numerical(e.to_string()))?;
    let compute = |tau: &f64| transport::total_current_correlation(&engine, *tau);
    let values: Vec<f64> = match jobs {
        Some(1) => taus.iter().map(compute).collect::<Result<_, _>>(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Validation(e.to_string()))?
            .install(|| taus.par_iter().map(compute).collect::<Result<_, _>>()),
        None => taus.par_iter().map(compute).collect::<Result<_, _>>(),
    }
    .map_err(|e| CliError::Numerical(e.to_string()))?;
    let err = engine.max_cached_error();

    let mut w = csv::Writer::from_path(out)
        .map_err(|e| CliError::Validation(format!("cannot open {}: {e}", out.display())))?;
    w.write_record(["tau", "K_JJ", "quad_error"])
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (tau, k) in taus.iter().zip(values.iter()) {
        w.write_record([format_float(*tau), format_float(*k), format_float(err)])
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    w.flush()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(())
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Steady {
            config,
            out,
            observables,
            tau_grid,
            criterion_spec,
            seed,
        } => cmd_steady(
            config,
            out,
            observables.as_deref(),
            tau_grid.as_deref(),
            criterion_spec,
            *seed,
        ),
        Command::Sweep {
            config,
            out,
            jobs,
            tau_grid,
            criterion_spec,
            seed,
        } => cmd_sweep(config, out, *jobs, tau_grid.as_deref(), criterion_spec, *seed),
        Command::Figure {
            name,
            out_dir,
            jobs,
            criterion_spec,
            seed,
        } => {
            let ctx = build_context(*seed, criterion_spec)?;
            match jobs {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(*n)
                    .build()
                    .map_err(|e| CliError::Validation(e.to_string()))?
                    .install(|| figures::run_figure(name, out_dir, &ctx)),
                None => figures::run_figure(name, out_dir, &ctx),
            }
        }
        Command::Correlate {
            config,
            tau_grid,
            out,
            jobs,
        } => cmd_correlate(config, tau_grid, out, *jobs),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
