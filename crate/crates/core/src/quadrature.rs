//! Adaptive Gauss–Kronrod integration for stationary spectra.
//!
//! The integrands handled here are smooth everywhere except for three
//! near-Lorentzian resonance peaks whose widths shrink with the dissipative
//! rates (down to ~1e−4 in units of Ω) plus an exponential tail beyond the
//! bath cutoff. Brackets around each peak are inserted into the initial panel
//! set so the adaptive refinement starts with the hard structure already
//! isolated; the rest is plain bisection on the largest error estimate.
//!
//! Panels use the 15-point Kronrod rule with its embedded 7-point Gauss
//! estimate. Summation order is deterministic (panels sorted by left edge),
//! so repeated runs produce bit-identical results.

use crate::model::{self, SystemConfig};
use crate::spectral::Susceptibility;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Resonance structure of an integrand on the frequency line.
#[derive(Debug, Clone)]
pub struct PeakSet {
    /// Peak positions, ascending (the dressed normal-mode frequencies).
    pub centers: [f64; 3],
    /// Estimated half-width scale of each peak.
    pub widths: [f64; 3],
}

/// Integration control. `omega_max` bounds the domain [−ω_max, ω_max]; the
/// default picks ω_c ln(1/rel_tol) past the highest peak so the exponential
/// tail is below tolerance at the edge.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Explicit domain edge; `None` derives it from the peak set.
    pub omega_max: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            max_subdivisions: 10_000,
            omega_max: None,
        }
    }
}

impl QuadratureSpec {
    /// Domain edge for a config: cutoff·ln(1/rel_tol) beyond the last peak.
    pub fn domain_edge(&self, peaks: &PeakSet, omega_c_max: f64) -> f64 {
        self.omega_max
            .unwrap_or(omega_c_max * (1.0 / self.rel_tol).ln() + peaks.centers[2])
    }
}

#[derive(Debug, Error)]
pub enum QuadError {
    #[error(
        "tolerance not met: estimate {estimate}, error {error} after {panels} panels"
    )]
    ToleranceNotMet {
        estimate: f64,
        error: f64,
        panels: usize,
    },
    #[error("integrand not finite at ω = {at}")]
    NonFiniteIntegrand { at: f64 },
    #[error(transparent)]
    Model(#[from] model::ModelError),
}

/// Converged integral with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
}

// 15-point Kronrod nodes/weights with embedded 7-point Gauss weights
// (QUADPACK dqk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.000_000_000_000_000_0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

// Returns (value, error estimate, round-off floor). The floor is the
// smallest error the rule can certify given the magnitude of the integrand.
fn kronrod15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64, f64), QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64, QuadError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFiniteIntegrand { at: x })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = kronrod.abs();
    let mut samples = [0.0f64; 15];
    samples[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        samples[j] = f1;
        samples[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((samples[j] - mean).abs() + (samples[14 - j] - mean).abs());
    }
    let value = kronrod * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    Ok((value, err, floor))
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.a == other.a
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Largest error first; ties broken by left edge for determinism.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn refine(
    f: &dyn Fn(f64) -> f64,
    boundaries: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral, QuadError> {
    let mut heap = BinaryHeap::new();
    for w in boundaries.windows(2) {
        if w[1] > w[0] {
            let (value, error, floor) = kronrod15(f, w[0], w[1])?;
            heap.push(Panel {
                a: w[0],
                b: w[1],
                value,
                error,
                floor,
            });
        }
    }
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        let floor: f64 = heap.iter().map(|p| p.floor).sum();
        // Second condition: the remaining error is pure round-off; no split
        // can reduce it further.
        if err <= spec.abs_tol.max(spec.rel_tol * total.abs()) || err <= 2.0 * floor {
            break;
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(QuadError::ToleranceNotMet {
                estimate: sorted_sum(&heap),
                error: err,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("non-empty panel set");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer splittable in f64; accept its estimate.
            let mut done = worst;
            done.error = 0.0;
            heap.push(done);
            continue;
        }
        let (v1, e1, f1) = kronrod15(f, worst.a, mid)?;
        let (v2, e2, f2) = kronrod15(f, mid, worst.b)?;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            floor: f1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            floor: f2,
        });
    }
    let panels = heap.len();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Integral {
        value: sorted_sum(&heap),
        abs_error: error,
        panels,
    })
}

// Sum panels left to right so the result does not depend on heap history.
fn sorted_sum(heap: &BinaryHeap<Panel>) -> f64 {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    panels.iter().map(|p| p.value).sum()
}

/// Integrate `f` over the symmetric line [−ω_max, ω_max].
///
/// Initial panel boundaries are placed at ±(c ± s·width) for every peak
/// center c and s ∈ {1, 10, 100}, and at ω = 0 (integrands provide their
/// analytic ω → 0 limit there, keeping removable singularities off the
/// floating-point 0/0 path).
pub fn integrate_line(
    f: &dyn Fn(f64) -> f64,
    peaks: &PeakSet,
    omega_c_max: f64,
    spec: &QuadratureSpec,
) -> Result<Integral, QuadError> {
    let edge = spec.domain_edge(peaks, omega_c_max);
    let mut bounds = vec![0.0, edge, -edge];
    for (&c, &w) in peaks.centers.iter().zip(peaks.widths.iter()) {
        for s in [1.0, 10.0, 100.0] {
            for x in [c - s * w, c + s * w] {
                if x.abs() < edge && x != 0.0 {
                    bounds.push(x);
                    bounds.push(-x);
                }
            }
        }
        if c.abs() < edge {
            bounds.push(c);
            bounds.push(-c);
        }
    }
    bounds.sort_by(|a, b| a.total_cmp(b));
    bounds.dedup();
    refine(f, &bounds, spec)
}

/// Integrate `f` over [a, b] with no peak hints (used for oracle integrals
/// and the Kramers–Kronig pieces).
pub fn integrate_interval(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Integral, QuadError> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            panels: 0,
        });
    }
    // Start from a handful of panels so the error estimate is trustworthy
    // even for integrands with a few scales.
    let n = 8;
    let mut bounds = Vec::with_capacity(n + 1);
    for i in 0..=n {
        bounds.push(a + (b - a) * i as f64 / n as f64);
    }
    refine(f, &bounds, spec)
}

/// Peak locations and widths for a configuration: dressed normal-mode
/// frequencies with perturbative per-mode damping
/// width_k = Σ_i |v_{k,i}|² Im χ̃_i(ω_k) / (ħ m ω_k).
pub fn estimate_widths(cfg: &SystemConfig) -> Result<PeakSet, QuadError> {
    let modes = model::normal_modes(cfg)?;
    let mut centers = [0.0; 3];
    let mut widths = [0.0; 3];
    for (k, (freq, vec)) in modes.iter().enumerate() {
        centers[k] = *freq;
        let mut w = 0.0;
        for i in 0..3 {
            let s = Susceptibility::from_bath(&cfg.baths[i], cfg.mass);
            w += vec[i] * vec[i] * s.imag(*freq) / (cfg.mass * freq);
        }
        widths[k] = w.max(1e-300);
    }
    Ok(PeakSet { centers, widths })
}
