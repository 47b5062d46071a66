//! Multipartite separability figure of merit 𝒯_{κ,n} for the three-mode
//! chain state.
//!
//! τ_{κ,n} compares a phase-space coherence term against a weighted sum of
//! partition-dependent Husimi-type terms:
//!
//!   τ = exp(−2 XᵀJₙᵀ(Σ⁻¹+V⁻¹)⁻¹JₙX)/√det(Σ+V)
//!       − Σ_j a_j exp(−½ Xᵀ Pⱼᵀ(Σ+V)⁻¹ Pⱼ X)/√det(Σ+V)
//!
//! with a pure Gaussian probe covariance Σ and displacement X. A positive
//! maximum over (X, Σ) certifies κ-partite entanglement. The coefficient
//! sets (a_j, P_j, J_n) are data, shipped as versioned JSON files: the P_j
//! are the sign-flip maps of the mode partitions (each bipartition for
//! κ = 3, every sign pattern with weight 1/4 for κ = 2), which makes
//! Σ_j a_j ≥ 1 and τ ≤ 0 on fully separable states at X = 0 by
//! construction. Alternative coefficient files can be loaded at run time.

use super::nelder_mead::{self, Options as NmOptions};
use super::symplectic::product_probe;
use super::{scaled_interleaved, MeasuresError};
use crate::steady::CovarianceMatrix;
use nalgebra::{Matrix6, Vector6};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

/// Coefficients and partition maps defining one 𝒯_{κ,n} test (n = 3).
#[derive(Debug, Clone)]
pub struct CriterionSpec {
    pub kappa: u32,
    pub n: usize,
    pub a: Vec<f64>,
    pub partition_maps: Vec<Matrix6<f64>>,
    pub symplectic_form: Matrix6<f64>,
}

#[derive(Deserialize)]
struct RawSpec {
    kappa: u32,
    n: usize,
    a: Vec<f64>,
    #[serde(rename = "P")]
    p: Vec<Vec<f64>>,
    #[serde(rename = "Jn")]
    jn: Vec<f64>,
}

const T23_JSON: &str = include_str!("../../data/t23.json");
const T33_JSON: &str = include_str!("../../data/t33.json");

fn matrix_from_row_major(v: &[f64]) -> Option<Matrix6<f64>> {
    if v.len() != 36 {
        return None;
    }
    Some(Matrix6::from_fn(|r, c| v[6 * r + c]))
}

impl CriterionSpec {
    pub fn from_json_str(s: &str) -> Result<Self, MeasuresError> {
        let raw: RawSpec =
            serde_json::from_str(s).map_err(|e| MeasuresError::Parse(e.to_string()))?;
        if raw.n != 3 {
            return Err(MeasuresError::BadCriterionSpec(format!(
                "only n = 3 supported, got n = {}",
                raw.n
            )));
        }
        if raw.a.len() != raw.p.len() {
            return Err(MeasuresError::BadCriterionSpec(format!(
                "{} coefficients vs {} partition maps",
                raw.a.len(),
                raw.p.len()
            )));
        }
        let jn = matrix_from_row_major(&raw.jn).ok_or_else(|| {
            MeasuresError::BadCriterionSpec("Jn must hold 36 row-major entries".into())
        })?;
        let mut maps = Vec::with_capacity(raw.p.len());
        for (j, flat) in raw.p.iter().enumerate() {
            let m = matrix_from_row_major(flat).ok_or_else(|| {
                MeasuresError::BadCriterionSpec(format!("P[{j}] must hold 36 entries"))
            })?;
            if m.determinant().abs() < 1e-12 {
                return Err(MeasuresError::BadCriterionSpec(format!(
                    "P[{j}] is singular"
                )));
            }
            maps.push(m);
        }
        Ok(CriterionSpec {
            kappa: raw.kappa,
            n: raw.n,
            a: raw.a,
            partition_maps: maps,
            symplectic_form: jn,
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, MeasuresError> {
        let s = std::fs::read_to_string(path).map_err(|e| MeasuresError::Parse(e.to_string()))?;
        CriterionSpec::from_json_str(&s)
    }

    /// Shipped 𝒯_{2,3} data: any-entanglement test (four sign patterns,
    /// a_j = 1/4).
    pub fn bipartite_three_mode() -> CriterionSpec {
        CriterionSpec::from_json_str(T23_JSON).expect("embedded t23 data is valid")
    }

    /// Shipped 𝒯_{3,3} data: genuine-tripartite test (three bipartition
    /// flips, a_j = 1).
    pub fn genuine_tripartite() -> CriterionSpec {
        CriterionSpec::from_json_str(T33_JSON).expect("embedded t33 data is valid")
    }
}

pub(crate) fn tau_scaled(
    sigma_v: &Matrix6<f64>,
    x: &Vector6<f64>,
    probe: &Matrix6<f64>,
    spec: &CriterionSpec,
) -> Result<f64, MeasuresError> {
    let sum = probe + sigma_v;
    let det = sum.determinant();
    if !det.is_finite() || det <= 0.0 {
        return Err(MeasuresError::SingularSum);
    }
    let sum_inv = sum.try_inverse().ok_or(MeasuresError::SingularSum)?;
    // (Σ⁻¹ + V⁻¹)⁻¹ = V (Σ+V)⁻¹ Σ, evaluated with a single inverse and
    // symmetrized; the quadratic forms are nonnegative by construction, so
    // clamp away the round-off that ill-conditioned probes leave behind.
    let harmonic = sigma_v * sum_inv * probe;
    let harmonic = 0.5 * (harmonic + harmonic.transpose());
    let jx = spec.symplectic_form * x;
    let q1 = (2.0 * (jx.transpose() * harmonic * jx)[(0, 0)]).max(0.0);
    let mut tau = (-q1).exp();
    for (aj, pj) in spec.a.iter().zip(spec.partition_maps.iter()) {
        let px = pj * x;
        let qj = (0.5 * (px.transpose() * sum_inv * px)[(0, 0)]).max(0.0);
        tau -= aj * (-qj).exp();
    }
    let tau = tau / det.sqrt();
    if !tau.is_finite() {
        return Err(MeasuresError::SingularSum);
    }
    Ok(tau)
}

/// Evaluate τ_{κ,n} for a chain covariance, probe displacement X and probe
/// covariance Σ (both in the scaled mode-interleaved convention).
pub fn tau_kappa_n(
    v: &CovarianceMatrix,
    x: &Vector6<f64>,
    probe_sigma: &Matrix6<f64>,
    spec: &CriterionSpec,
) -> Result<f64, MeasuresError> {
    tau_scaled(&scaled_interleaved(v), x, probe_sigma, spec)
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizerBudget {
    pub restarts: usize,
    /// Function-evaluation cap per restart.
    pub max_evals: usize,
    pub seed: u64,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        OptimizerBudget {
            restarts: 8,
            max_evals: 3000,
            seed: 42,
        }
    }
}

/// Result of the 𝒯 maximization.
#[derive(Debug, Clone)]
pub struct MeasureResult {
    /// Best τ found: 𝒯_{κ,n} up to optimizer accuracy.
    pub value: f64,
    /// Displacement at the maximum.
    pub best_x: [f64; 6],
    /// False when no restart met the simplex tolerances within budget; the
    /// value is then the best seen so far.
    pub converged: bool,
    pub restarts: usize,
    pub best_restart: usize,
    pub evals: usize,
}

// 12 parameters: X ∈ ℝ⁶, then one rotation angle and one squeeze per mode.
// The probe is a product of single-mode pure states: the separability bound
// behind the shipped coefficient data assumes probes that factorize over the
// modes, and correlated probes would void it.
fn decode(theta: &[f64]) -> (Vector6<f64>, Matrix6<f64>) {
    let x = Vector6::from_fn(|i, _| theta[i]);
    let mut probe_params = [0.0; 6];
    probe_params.copy_from_slice(&theta[6..12]);
    (x, product_probe(&probe_params))
}

/// Maximize τ_{κ,n} over displacements and pure Gaussian probes with
/// multi-restart Nelder–Mead. Deterministic for a given (seed, budget):
/// restarts draw from independent seeded streams and ties keep the lowest
/// restart index.
pub fn optimize_criterion(
    v: &CovarianceMatrix,
    spec: &CriterionSpec,
    budget: &OptimizerBudget,
) -> Result<MeasureResult, MeasuresError> {
    let sigma_v = scaled_interleaved(v);
    let objective = |theta: &[f64]| -> f64 {
        let (x, probe) = decode(theta);
        match tau_scaled(&sigma_v, &x, &probe, spec) {
            Ok(tau) => -tau,
            Err(_) => f64::INFINITY,
        }
    };

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(budget.restarts);
    starts.push(vec![0.0; 12]);
    if budget.restarts > 1 {
        // Probe squeezed to the local x/p variance ratio of each mode.
        let mut theta = vec![0.0; 12];
        for mode in 0..3 {
            let vx = sigma_v[(2 * mode, 2 * mode)];
            let vp = sigma_v[(2 * mode + 1, 2 * mode + 1)];
            theta[9 + mode] = 0.25 * (vp / vx).ln();
        }
        starts.push(theta);
    }
    for idx in starts.len()..budget.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(
            budget
                .seed
                .wrapping_add(idx as u64)
                .wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let mut theta = vec![0.0; 12];
        for t in theta.iter_mut().take(6) {
            *t = rng.random_range(-2.0..2.0);
        }
        for t in theta.iter_mut().skip(6) {
            *t = rng.random_range(-0.9..0.9);
        }
        starts.push(theta);
    }

    let opts = NmOptions {
        max_evals: budget.max_evals,
        ..NmOptions::default()
    };
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    let mut evals = 0;
    let mut any_converged = false;
    for (idx, start) in starts.iter().enumerate() {
        let out = nelder_mead::minimize(objective, start, 0.4, &opts);
        evals += out.evals;
        any_converged |= out.converged;
        let tau = -out.f;
        let better = match &best {
            None => true,
            Some((b, _, _)) => tau > *b,
        };
        if better {
            best = Some((tau, out.x, idx));
        }
    }
    let (value, theta, best_restart) = best.expect("at least one restart");
    let (x, _) = decode(&theta);
    Ok(MeasureResult {
        value,
        best_x: [x[0], x[1], x[2], x[3], x[4], x[5]],
        converged: any_converged,
        restarts: budget.restarts,
        best_restart,
        evals,
    })
}
