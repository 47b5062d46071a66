//! Named preset scans. The numeric parameters live in the JSON files under
//! `presets/`; this module turns them into grids of chain configurations and
//! evaluates the requested observables, one CSV (plus a gnuplot twin) per
//! output panel.

use crate::observables::{columns, evaluate, MeasureContext, Observable};
use crate::sweep::{format_float, write_csv, write_gnuplot, SweepResult};
use crate::CliError;
use rayon::prelude::*;
use serde::Deserialize;
use std::path::Path;
use trichain::model::{presets::ChainSpec, SpectralKind};
use trichain::{transport, Engine};

const FIG1: &str = include_str!("../presets/fig1.json");
const FIG2: &str = include_str!("../presets/fig2.json");
const FIG3: &str = include_str!("../presets/fig3.json");
const FIG31: &str = include_str!("../presets/fig31.json");
const FIG4: &str = include_str!("../presets/fig4.json");
const FIG5: &str = include_str!("../presets/fig5.json");

pub const FIGURE_NAMES: [&str; 6] = ["fig1", "fig2", "fig3", "fig31", "fig4", "fig5"];

#[derive(Debug, Clone, Deserialize)]
struct LinGrid {
    start: f64,
    stop: f64,
    n: usize,
}

impl LinGrid {
    fn values(&self) -> Vec<f64> {
        if self.n <= 1 {
            return vec![self.start];
        }
        (0..self.n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
struct ChainParams {
    coupling_k: f64,
    delta_omega: f64,
    temperature: f64,
    side_gradient: f64,
}

impl ChainParams {
    fn spec(&self, kind: SpectralKind, central_gradient: f64) -> ChainSpec {
        ChainSpec {
            kind,
            delta_omega: self.delta_omega,
            coupling_k: self.coupling_k,
            temperature: self.temperature,
            side_gradient: self.side_gradient,
            central_gradient,
            squeeze_r: [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct KjjTraces {
    gradients: Vec<f64>,
    tau: LinGrid,
}

#[derive(Debug, Clone, Deserialize)]
struct Preset {
    name: String,
    chain: ChainParams,
    kinds: Vec<String>,
    #[serde(default)]
    central_gradient: Option<LinGrid>,
    #[serde(default)]
    coupling: Option<LinGrid>,
    #[serde(default)]
    outputs: Vec<String>,
    #[serde(default)]
    kjj_traces: Option<KjjTraces>,
    #[serde(default)]
    detuning: Option<LinGrid>,
    #[serde(default)]
    detuning_gradients: Vec<f64>,
    #[serde(default)]
    resonance_gradient: Option<LinGrid>,
    #[serde(default)]
    squeeze_center: Vec<f64>,
    #[serde(default)]
    outputs_detuning: Vec<String>,
    #[serde(default)]
    outputs_interaction: Vec<String>,
    #[serde(default)]
    outputs_gradient: Vec<String>,
}

fn parse_kind(s: &str) -> Result<SpectralKind, CliError> {
    match s {
        "ohmic" => Ok(SpectralKind::Ohmic),
        "super_ohmic" => Ok(SpectralKind::SuperOhmic),
        other => Err(CliError::Validation(format!("preset kind `{other}`"))),
    }
}

fn kind_tag(kind: SpectralKind) -> &'static str {
    match kind {
        SpectralKind::Ohmic => "ohmic",
        SpectralKind::SuperOhmic => "super_ohmic",
    }
}

fn load(name: &str) -> Result<Preset, CliError> {
    let raw = match name {
        "fig1" => FIG1,
        "fig2" => FIG2,
        "fig3" => FIG3,
        "fig31" => FIG31,
        "fig4" => FIG4,
        "fig5" => FIG5,
        other => {
            return Err(CliError::Validation(format!(
                "unknown preset `{other}`; available: {}",
                FIGURE_NAMES.join(", ")
            )))
        }
    };
    serde_json::from_str(raw)
        .map_err(|e| CliError::Validation(format!("preset {name} does not parse: {e}")))
}

fn parse_outputs(names: &[String]) -> Result<Vec<Observable>, CliError> {
    names
        .iter()
        .map(|s| Observable::parse(s).map_err(CliError::Validation))
        .collect()
}

// Evaluate `observables` on one chain configuration; returns formatted
// values plus the covariance error scale.
fn eval_chain(
    spec: &ChainSpec,
    observables: &[Observable],
    tau_grid: &[f64],
    ctx: &MeasureContext,
) -> Result<(Vec<f64>, f64), String> {
    let cfg = spec.build().map_err(|e| e.to_string())?;
    let engine = Engine::new(cfg).map_err(|e| e.to_string())?;
    let cov = engine.covariance().map_err(|e| e.to_string())?;
    let mut vals = Vec::new();
    for obs in observables {
        vals.extend(evaluate(obs, &engine, &cov, tau_grid, ctx)?);
    }
    Ok((vals, cov.max_abs_error))
}

/// One output table: rows over `axis`, one column group per series.
fn run_series_table(
    axis_label: &str,
    axis_values: &[f64],
    series: &[(String, ChainSpec)],
    series_specs: &(dyn Fn(&ChainSpec, f64) -> ChainSpec + Sync),
    observables: &[Observable],
    ctx: &MeasureContext,
) -> SweepResult {
    let mut header = vec![axis_label.to_string()];
    for (tag, _) in series {
        for obs in observables {
            for col in columns(obs, &[0.0]) {
                header.push(format!("{col}{tag}"));
            }
        }
    }
    header.push("quad_error".into());
    header.push("error".into());

    let rows: Vec<Vec<String>> = axis_values
        .par_iter()
        .map(|&v| {
            let mut row = vec![format_float(v)];
            let mut worst = 0.0f64;
            let mut err_msg = String::new();
            for (_, base) in series {
                match eval_chain(&series_specs(base, v), observables, &[0.0], ctx) {
                    Ok((vals, e)) => {
                        row.extend(vals.iter().map(|x| format_float(*x)));
                        worst = worst.max(e);
                    }
                    Err(msg) => {
                        row.extend(
                            std::iter::repeat_n(
                                String::new(),
                                observables.iter().map(|o| columns(o, &[0.0]).len()).sum(),
                            ),
                        );
                        err_msg = msg;
                    }
                }
            }
            row.push(format_float(worst));
            row.push(err_msg);
            row
        })
        .collect();
    let successes = rows
        .iter()
        .filter(|r| r.last().is_some_and(|e| e.is_empty()))
        .count();
    SweepResult {
        header,
        rows,
        successes,
    }
}

fn grid_table(
    preset: &Preset,
    kind: SpectralKind,
    observables: &[Observable],
    ctx: &MeasureContext,
) -> Result<SweepResult, CliError> {
    let grads = preset
        .central_gradient
        .as_ref()
        .ok_or_else(|| CliError::Validation("preset lacks central_gradient".into()))?
        .values();
    match &preset.coupling {
        None => Ok(run_series_table(
            "central_gradient",
            &grads,
            &[(String::new(), preset.chain.spec(kind, 0.0))],
            &|base, g| ChainSpec {
                central_gradient: g,
                ..*base
            },
            observables,
            ctx,
        )),
        Some(kgrid) => {
            // Two axes: gradient outer, coupling inner, one row per point.
            let ks = kgrid.values();
            let mut header = vec!["central_gradient".to_string(), "coupling_k".to_string()];
            for obs in observables {
                header.extend(columns(obs, &[0.0]));
            }
            header.push("quad_error".into());
            header.push("error".into());
            let points: Vec<(f64, f64)> = grads
                .iter()
                .flat_map(|&g| ks.iter().map(move |&k| (g, k)))
                .collect();
            let rows: Vec<Vec<String>> = points
                .par_iter()
                .map(|&(g, k)| {
                    let mut row = vec![format_float(g), format_float(k)];
                    let spec = ChainSpec {
                        central_gradient: g,
                        coupling_k: k,
                        ..preset.chain.spec(kind, g)
                    };
                    match eval_chain(&spec, observables, &[0.0], ctx) {
                        Ok((vals, e)) => {
                            row.extend(vals.iter().map(|x| format_float(*x)));
                            row.push(format_float(e));
                            row.push(String::new());
                        }
                        Err(msg) => {
                            let n: usize =
                                observables.iter().map(|o| columns(o, &[0.0]).len()).sum();
                            row.extend(std::iter::repeat_n(String::new(), n + 1));
                            row.push(msg);
                        }
                    }
                    row
                })
                .collect();
            let successes = rows
                .iter()
                .filter(|r| r.last().is_some_and(|e| e.is_empty()))
                .count();
            Ok(SweepResult {
                header,
                rows,
                successes,
            })
        }
    }
}

fn kjj_table(
    preset: &Preset,
    kind: SpectralKind,
    traces: &KjjTraces,
) -> Result<SweepResult, CliError> {
    let taus = traces.tau.values();
    let mut header = vec!["tau".to_string()];
    for g in &traces.gradients {
        header.push(format!("K_JJ@grad{g}"));
    }
    header.push("quad_error".into());
    header.push("error".into());

    let mut columns_data: Vec<Vec<f64>> = Vec::new();
    let mut worst = 0.0f64;
    for &g in &traces.gradients {
        let cfg = preset
            .chain
            .spec(kind, g)
            .build()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let engine = Engine::new(cfg).map_err(|e| CliError::Numerical(e.to_string()))?;
        let vals: Vec<f64> = taus
            .par_iter()
            .map(|&tau| transport::total_current_correlation(&engine, tau))
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        worst = worst.max(engine.max_cached_error());
        columns_data.push(vals);
    }
    let rows: Vec<Vec<String>> = taus
        .iter()
        .enumerate()
        .map(|(i, &tau)| {
            let mut row = vec![format_float(tau)];
            for col in &columns_data {
                row.push(format_float(col[i]));
            }
            row.push(format_float(worst));
            row.push(String::new());
            row
        })
        .collect();
    let successes = rows.len();
    Ok(SweepResult {
        header,
        rows,
        successes,
    })
}

fn emit(out_dir: &Path, stem: &str, table: &SweepResult) -> Result<(), CliError> {
    write_csv(&out_dir.join(format!("{stem}.csv")), table)?;
    write_gnuplot(&out_dir.join(format!("{stem}.dat")), table)
}

/// Run one named preset, writing its CSV/dat files under `out_dir`.
pub fn run_figure(name: &str, out_dir: &Path, ctx: &MeasureContext) -> Result<(), CliError> {
    let preset = load(name)?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Validation(format!("create {}: {e}", out_dir.display())))?;

    match preset.name.as_str() {
        "fig1" => {
            let obs = parse_outputs(&preset.outputs)?;
            for kind_name in &preset.kinds {
                let kind = parse_kind(kind_name)?;
                let table = grid_table(&preset, kind, &obs, ctx)?;
                emit(out_dir, &format!("fig1_{}", kind_tag(kind)), &table)?;
            }
        }
        "fig2" | "fig31" | "fig5" => {
            let obs = parse_outputs(&preset.outputs)?;
            let kind = parse_kind(&preset.kinds[0])?;
            let table = grid_table(&preset, kind, &obs, ctx)?;
            emit(out_dir, &preset.name.clone(), &table)?;
        }
        "fig3" => {
            let obs = parse_outputs(&preset.outputs)?;
            let kind = parse_kind(&preset.kinds[0])?;
            let table = grid_table(&preset, kind, &obs, ctx)?;
            emit(out_dir, "fig3_criteria", &table)?;
            if let Some(traces) = &preset.kjj_traces {
                let table = kjj_table(&preset, kind, traces)?;
                emit(out_dir, "fig3_kjj", &table)?;
            }
        }
        "fig4" => {
            let detuning = preset
                .detuning
                .as_ref()
                .ok_or_else(|| CliError::Validation("fig4 lacks detuning grid".into()))?
                .values();
            // Series over (gradient, kind).
            let mut series = Vec::new();
            for &g in &preset.detuning_gradients {
                for kind_name in &preset.kinds {
                    let kind = parse_kind(kind_name)?;
                    series.push((
                        format!("@grad{g}_{}", kind_tag(kind)),
                        preset.chain.spec(kind, g),
                    ));
                }
            }
            let by_detuning = |base: &ChainSpec, dw: f64| ChainSpec {
                delta_omega: dw,
                ..*base
            };
            let obs = parse_outputs(&preset.outputs_detuning)?;
            let table = run_series_table("delta_omega", &detuning, &series, &by_detuning, &obs, ctx);
            emit(out_dir, "fig4_discord_detuning", &table)?;

            let obs = parse_outputs(&preset.outputs_interaction)?;
            let table = run_series_table("delta_omega", &detuning, &series, &by_detuning, &obs, ctx);
            emit(out_dir, "fig4_interaction_detuning", &table)?;

            // Right panel: resonance, gradient axis, series over (r_C, kind).
            let grads = preset
                .resonance_gradient
                .as_ref()
                .ok_or_else(|| CliError::Validation("fig4 lacks resonance_gradient".into()))?
                .values();
            let mut series = Vec::new();
            for &r in &preset.squeeze_center {
                for kind_name in &preset.kinds {
                    let kind = parse_kind(kind_name)?;
                    let mut spec = preset.chain.spec(kind, 0.0);
                    spec.squeeze_r = [0.0, r, 0.0];
                    spec.delta_omega = 0.0;
                    series.push((format!("@rC{r}_{}", kind_tag(kind)), spec));
                }
            }
            let by_gradient = |base: &ChainSpec, g: f64| ChainSpec {
                central_gradient: g,
                ..*base
            };
            let obs = parse_outputs(&preset.outputs_gradient)?;
            let table =
                run_series_table("central_gradient", &grads, &series, &by_gradient, &obs, ctx);
            emit(out_dir, "fig4_discord_gradient", &table)?;
        }
        other => {
            return Err(CliError::Validation(format!(
                "preset `{other}` has no runner"
            )))
        }
    }
    Ok(())
}
