//! Parameter sweeps: grid construction, parallel evaluation, CSV output.
//!
//! Rows follow the deterministic grid order (first axis outer, second inner)
//! regardless of the worker count, and numbers are printed with 17
//! significant digits, so re-runs produce byte-identical files.

use crate::observables::{columns, evaluate, MeasureContext, Observable};
use crate::CliError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use trichain::{model, Engine};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Axis {
    /// Dotted path into the configuration document, e.g. "k", "omega.1",
    /// "baths.1.T".
    pub path: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Configuration document the axes mutate.
    pub base: Value,
    /// One or two axes.
    pub axes: Vec<Axis>,
    /// Observable names from the closed vocabulary.
    pub outputs: Vec<String>,
    /// Lag grid for K_JJ outputs.
    #[serde(default)]
    pub tau_grid: Vec<f64>,
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn set_path(doc: &mut Value, path: &str, value: f64) -> Result<(), String> {
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (idx, part) in parts.iter().enumerate() {
        let last = idx == parts.len() - 1;
        if let Ok(n) = part.parse::<usize>() {
            let arr = cur
                .as_array_mut()
                .ok_or_else(|| format!("path `{path}`: `{part}` indexes a non-array"))?;
            let slot = arr
                .get_mut(n)
                .ok_or_else(|| format!("path `{path}`: index {n} out of range"))?;
            if last {
                *slot = Value::from(value);
                return Ok(());
            }
            cur = slot;
        } else {
            let obj = cur
                .as_object_mut()
                .ok_or_else(|| format!("path `{path}`: `{part}` keys a non-object"))?;
            if last {
                obj.insert((*part).to_string(), Value::from(value));
                return Ok(());
            }
            cur = obj
                .get_mut(*part)
                .ok_or_else(|| format!("path `{path}`: missing key `{part}`"))?;
        }
    }
    Err(format!("empty path `{path}`"))
}

pub struct SweepResult {
    pub header: Vec<String>,
    /// One row per grid point, already formatted.
    pub rows: Vec<Vec<String>>,
    pub successes: usize,
}

/// Run every grid point and assemble rows in grid order. `jobs` bounds the
/// worker pool (None: rayon default).
pub fn run_sweep(
    spec: &SweepSpec,
    jobs: Option<usize>,
    seed: u64,
    ctx_template: &(dyn Fn(u64) -> MeasureContext + Sync),
) -> Result<SweepResult, CliError> {
    if spec.axes.is_empty() || spec.axes.len() > 2 {
        return Err(CliError::Validation(format!(
            "sweep needs 1 or 2 axes, got {}",
            spec.axes.len()
        )));
    }
    for ax in &spec.axes {
        if ax.values.is_empty() || ax.values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Validation(format!(
                "axis `{}` grid must be nonempty and finite",
                ax.path
            )));
        }
    }
    let observables: Vec<Observable> = spec
        .outputs
        .iter()
        .map(|s| Observable::parse(s))
        .collect::<Result<_, _>>()
        .map_err(CliError::Validation)?;
    let tau_grid = if spec.tau_grid.is_empty() {
        vec![0.0]
    } else {
        spec.tau_grid.clone()
    };

    let mut header: Vec<String> = spec.axes.iter().map(|a| a.path.clone()).collect();
    for obs in &observables {
        header.extend(columns(obs, &tau_grid));
    }
    header.push("quad_error".into());
    header.push("error".into());

    // Grid points in deterministic order: first axis outer.
    let mut points: Vec<Vec<(String, f64)>> = Vec::new();
    match spec.axes.len() {
        1 => {
            for &v in &spec.axes[0].values {
                points.push(vec![(spec.axes[0].path.clone(), v)]);
            }
        }
        _ => {
            for &v0 in &spec.axes[0].values {
                for &v1 in &spec.axes[1].values {
                    points.push(vec![
                        (spec.axes[0].path.clone(), v0),
                        (spec.axes[1].path.clone(), v1),
                    ]);
                }
            }
        }
    }

    let eval_point = |pt: &Vec<(String, f64)>| -> Vec<String> {
        let mut row: Vec<String> = pt.iter().map(|(_, v)| format_float(*v)).collect();
        let n_value_cols = header.len() - row.len() - 2;
        let mut doc = spec.base.clone();
        let outcome = (|| -> Result<(Vec<f64>, f64), String> {
            for (path, v) in pt {
                set_path(&mut doc, path, *v)?;
            }
            let cfg = model::validate_value(doc.clone()).map_err(|e| e.to_string())?;
            let engine = Engine::new(cfg).map_err(|e| e.to_string())?;
            let cov = engine.covariance().map_err(|e| e.to_string())?;
            let ctx = ctx_template(seed);
            let mut vals = Vec::with_capacity(n_value_cols);
            for obs in &observables {
                vals.extend(evaluate(obs, &engine, &cov, &tau_grid, &ctx)?);
            }
            Ok((vals, cov.max_abs_error))
        })();
        match outcome {
            Ok((vals, quad_err)) => {
                row.extend(vals.iter().map(|v| format_float(*v)));
                row.push(format_float(quad_err));
                row.push(String::new());
            }
            Err(msg) => {
                row.extend(std::iter::repeat_n(String::new(), n_value_cols + 1));
                row.push(msg);
            }
        }
        row
    };

    let rows: Vec<Vec<String>> = match jobs {
        Some(1) => points.iter().map(eval_point).collect(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Validation(e.to_string()))?;
            pool.install(|| points.par_iter().map(eval_point).collect())
        }
        None => points.par_iter().map(eval_point).collect(),
    };

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

pub fn write_csv(path: &std::path::Path, result: &SweepResult) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Validation(format!("cannot open {}: {e}", path.display())))?;
    w.write_record(&result.header)
        .and_then(|_| {
            for row in &result.rows {
                w.write_record(row)?;
            }
            w.flush()?;
            Ok(())
        })
        .map_err(|e| CliError::Validation(format!("write {}: {e}", path.display())))
}

/// Space-separated variant with a comment header. Two-axis sweeps insert a
/// blank line whenever the first axis steps, which is the block layout
/// gnuplot's splot expects.
pub fn write_gnuplot(path: &std::path::Path, result: &SweepResult) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = String::new();
    out.push_str(&format!("# {}\n", result.header.join(" ")));
    let mut prev_first: Option<&str> = None;
    for row in &result.rows {
        if let Some(prev) = prev_first {
            if row[0] != prev {
                out.push('\n');
            }
        }
        prev_first = Some(&row[0]);
        let printable: Vec<&str> = row
            .iter()
            .map(|s| if s.is_empty() { "nan" } else { s.as_str() })
            .collect();
        // Drop the trailing free-text error column from the numeric file.
        out.push_str(&printable[..printable.len() - 1].join(" "));
        out.push('\n');
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| CliError::Validation(format!("write {}: {e}", path.display())))
}
