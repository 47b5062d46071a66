//! Stationary state of the damped chain: Green matrix, noise spectra,
//! two-time correlators and the 6×6 covariance matrix.
//!
//! Solving the Langevin equation in frequency space gives x̃(ω) = α̃(ω) F̃(ω)
//! with α̃ = (Γ + U)⁻¹. Averaging over the initial bath state collapses the
//! double frequency integral onto the noise diagonal, leaving a single line
//! integral for every stationary two-time correlator:
//!
//!   C_ab(τ) = (ħ/2π) ∫ dω e^(−iωτ) w_ab(ω) Σ_l α̃_il(ω) D_l(ω) α̃*_jl(ω)
//!
//! where D_l = Im[χ̃_l/ħ]·coth(ħω/2k_BT_l)·cosh(2r_l) for the symmetrized
//! correlator and D_l = Im[χ̃_l/ħ] for the commutator, and w_ab supplies the
//! ±imω / m²ω² factors that turn positions into momenta. The commutator
//! channel is state independent and must return [x, p] = iħ exactly; that,
//! together with the equipartition and ground-state limits of a single
//! oscillator, pins every factor in the assembly.

use crate::model::{self, Site, SystemConfig};
use crate::quadrature::{self, PeakSet, QuadError, QuadratureSpec};
use crate::spectral::Susceptibility;
use nalgebra::{DMatrix, Matrix3, Matrix6};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::RwLock;
use thiserror::Error;

/// Phase-space operator of the chain: position or momentum of one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpId {
    X(Site),
    P(Site),
}

impl OpId {
    pub fn site(self) -> Site {
        match self {
            OpId::X(s) | OpId::P(s) => s,
        }
    }

    fn is_momentum(self) -> bool {
        matches!(self, OpId::P(_))
    }
}

#[derive(Debug, Error)]
pub enum SteadyError {
    #[error("Green matrix singular at ω = {omega} (bound mode?)")]
    SingularMatrix { omega: f64 },
    #[error("configuration fails the stationarity check: {0:?}")]
    NotStationary(StationarityReport),
    #[error(
        "correlator lost reality: value {value}, spurious part {residual} (a={a:?}, b={b:?}, τ={tau})"
    )]
    RealityViolation {
        a: OpId,
        b: OpId,
        tau: f64,
        value: f64,
        residual: f64,
    },
    #[error("covariance violates physicality: {0}")]
    PhysicalityViolation(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Model(#[from] model::ModelError),
}

/// Outcome of the pre-flight stability analysis.
#[derive(Debug, Clone, Serialize)]
pub struct StationarityReport {
    pub pass: bool,
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
    /// Dressed normal-mode frequencies (ascending), when defined.
    pub dressed: Option<[f64; 3]>,
    /// min_i ω_c,i / √(ω_i² + k/m); must exceed 1, comfortably above 5.
    pub cutoff_margin: f64,
    /// Smallest |det(Γ+U)| seen on the scan grid.
    pub min_abs_det: f64,
}

/// Check that the configuration relaxes to a well-defined stationary state:
/// the bath spectra must extend well past every chain frequency
/// (ω_c ≫ √(ω_i² + k/m)), the renormalized potential must be positive
/// definite, and det(Γ+U) must stay away from zero on the real axis relative
/// to the dissipative scale (no bound modes).
pub fn stationarity_check(cfg: &SystemConfig) -> StationarityReport {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    let mut cutoff_margin = f64::INFINITY;
    for i in 0..3 {
        let chain_scale = (cfg.omega[i] * cfg.omega[i] + cfg.coupling_k / cfg.mass).sqrt();
        let margin = cfg.baths[i].omega_c / chain_scale;
        cutoff_margin = cutoff_margin.min(margin);
        if margin <= 1.0 {
            violations.push(format!(
                "bath {i}: cutoff ω_c = {} below the chain frequency scale {chain_scale:.4}; \
                 bound normal mode expected",
                cfg.baths[i].omega_c
            ));
        } else if margin < 5.0 {
            warnings.push(format!(
                "bath {i}: cutoff margin ω_c/√(ω² + k/m) = {margin:.2} < 5; stationary state \
                 only marginally guaranteed"
            ));
        }
    }

    let dressed = match model::dressed_frequencies(cfg) {
        Ok(d) => Some(d),
        Err(e) => {
            violations.push(format!("renormalized potential not positive definite: {e}"));
            None
        }
    };

    // Scan |det(Γ+U)| on a grid plus the resonance dips themselves, and
    // compare against the dissipative floor.
    let mut min_abs_det = f64::INFINITY;
    if let Some(d) = dressed {
        let susc: Vec<Susceptibility> = cfg
            .baths
            .iter()
            .map(|b| Susceptibility::from_bath(b, cfg.mass))
            .collect();
        let hi = 1.5 * d[2].max(1.0);
        let mut samples: Vec<f64> = (1..=1500).map(|i| hi * i as f64 / 1500.0).collect();
        if let Ok(peaks) = quadrature::estimate_widths(cfg) {
            for k in 0..3 {
                samples.push(peaks.centers[k]);
                samples.push(peaks.centers[k] - peaks.widths[k]);
                samples.push(peaks.centers[k] + peaks.widths[k]);
            }
        }
        let u = model::coupling_matrix(cfg.coupling_k);
        let mut max_im = 0.0f64;
        let mut det_at_min_scale = 0.0;
        for &w in &samples {
            let mut a = u.map(|x| Complex64::new(x, 0.0));
            for i in 0..3 {
                let gamma_ii = cfg.mass
                    * (cfg.omega[i] * cfg.omega[i] + cfg.baths[i].frequency_shift() - w * w);
                a[(i, i)] += Complex64::new(gamma_ii, 0.0) - susc[i].eval(w);
                max_im = max_im.max(susc[i].imag(w));
            }
            let det = a.determinant().norm();
            if det < min_abs_det {
                min_abs_det = det;
                let scale = cfg.mass * (w * w + d[2] * d[2]);
                det_at_min_scale = scale * scale;
            }
        }
        let floor = 1e-8 * max_im * det_at_min_scale;
        if min_abs_det < floor {
            warnings.push(format!(
                "near-bound mode: min |det(Γ+U)| = {min_abs_det:.3e} under the dissipative \
                 floor {floor:.3e}"
            ));
        }
    }

    StationarityReport {
        pass: violations.is_empty(),
        violations,
        warnings,
        dressed,
        cutoff_margin,
        min_abs_det,
    }
}

/// Equal-time second moments of (x_L, x_C, x_R, p_L, p_C, p_R), in units with
/// ħ = 1 (vacuum variances ħ/2 on the diagonal).
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    mat: Matrix6<f64>,
    /// Largest quadrature error estimate among the entries.
    pub max_abs_error: f64,
}

impl CovarianceMatrix {
    pub fn from_matrix(mat: Matrix6<f64>) -> Self {
        CovarianceMatrix {
            mat,
            max_abs_error: 0.0,
        }
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.mat
    }

    /// ⟨x_i x_j⟩ symmetrized.
    pub fn xx(&self, i: Site, j: Site) -> f64 {
        self.mat[(i.index(), j.index())]
    }

    /// (1/2)⟨{x_i, p_j}⟩.
    pub fn xp(&self, i: Site, j: Site) -> f64 {
        self.mat[(i.index(), 3 + j.index())]
    }

    /// ⟨p_i p_j⟩ symmetrized.
    pub fn pp(&self, i: Site, j: Site) -> f64 {
        self.mat[(3 + i.index(), 3 + j.index())]
    }

    /// Smallest eigenvalue of 2V/ħ + iΩ_symp; ≥ 0 (within numerics) exactly
    /// when the state satisfies the uncertainty relation.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        // Hermitian H = σ + iJ embeds into the real symmetric [[σ, −J],[J, σ]].
        let sigma = 2.0 * self.mat;
        let mut embed = DMatrix::<f64>::zeros(12, 12);
        for r in 0..6 {
            for c in 0..6 {
                embed[(r, c)] = sigma[(r, c)];
                embed[(6 + r, 6 + c)] = sigma[(r, c)];
            }
        }
        for i in 0..3 {
            // J = [[0, I],[−I, 0]] in xxpp ordering.
            embed[(i, 6 + 3 + i)] = -1.0;
            embed[(3 + i, 6 + i)] = 1.0;
            embed[(6 + i, 3 + i)] = 1.0;
            embed[(6 + 3 + i, i)] = -1.0;
        }
        let eig = embed.symmetric_eigenvalues();
        eig.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Covariance of the configuration with left and right sites relabeled.
    pub fn reflected(&self) -> CovarianceMatrix {
        let perm = [2usize, 1, 0];
        let mut out = Matrix6::zeros();
        for r in 0..6 {
            for c in 0..6 {
                let pr = if r < 3 { perm[r] } else { 3 + perm[r - 3] };
                let pc = if c < 3 { perm[c] } else { 3 + perm[c - 3] };
                out[(pr, pc)] = self.mat[(r, c)];
            }
        }
        CovarianceMatrix {
            mat: out,
            max_abs_error: self.max_abs_error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Channel {
    Sym,
    Comm,
}

type CacheKey = (OpId, OpId, u64, Channel);

/// Stationary-state solver for one configuration. Correlators are memoized;
/// the cache is safe for concurrent use and results do not depend on
/// evaluation order.
pub struct Engine {
    cfg: SystemConfig,
    susc: [Susceptibility; 3],
    peaks: PeakSet,
    omega_c_max: f64,
    spec: QuadratureSpec,
    report: StationarityReport,
    cache: RwLock<HashMap<CacheKey, (f64, f64)>>,
}

impl Engine {
    pub fn new(cfg: SystemConfig) -> Result<Engine, SteadyError> {
        Engine::with_spec(cfg, QuadratureSpec::default())
    }

    pub fn with_spec(cfg: SystemConfig, spec: QuadratureSpec) -> Result<Engine, SteadyError> {
        let report = stationarity_check(&cfg);
        if !report.pass {
            return Err(SteadyError::NotStationary(report));
        }
        let peaks = quadrature::estimate_widths(&cfg)?;
        let omega_c_max = cfg.baths.iter().map(|b| b.omega_c).fold(f64::MIN, f64::max);
        let susc = [
            Susceptibility::from_bath(&cfg.baths[0], cfg.mass),
            Susceptibility::from_bath(&cfg.baths[1], cfg.mass),
            Susceptibility::from_bath(&cfg.baths[2], cfg.mass),
        ];
        Ok(Engine {
            cfg,
            susc,
            peaks,
            omega_c_max,
            spec,
            report,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn report(&self) -> &StationarityReport {
        &self.report
    }

    pub fn peaks(&self) -> &PeakSet {
        &self.peaks
    }

    /// α̃(ω) = (Γ + U)⁻¹ with Γ_ii = m(Ω_i² − ω²) − χ̃_i(ω)/ħ.
    pub fn green_matrix(&self, omega: f64) -> Result<Matrix3<Complex64>, SteadyError> {
        let u = model::coupling_matrix(self.cfg.coupling_k);
        let mut a = u.map(|x| Complex64::new(x, 0.0));
        for i in 0..3 {
            let real = self.cfg.mass
                * (self.cfg.omega[i] * self.cfg.omega[i] + self.cfg.baths[i].frequency_shift()
                    - omega * omega);
            a[(i, i)] += Complex64::new(real, 0.0) - self.susc[i].eval(omega);
        }
        a.try_inverse().ok_or(SteadyError::SingularMatrix { omega })
    }

    // Noise diagonal of the symmetrized channel:
    // D_l = Im[χ̃_l/ħ] coth(ω/2T_l) cosh(2r_l). Even in ω; the ω → 0 limit is
    // π m γ T cosh(2r) for Ohmic baths and 0 for super-Ohmic.
    fn noise_sym(&self, l: usize, omega: f64) -> f64 {
        let b = &self.cfg.baths[l];
        let boost = (2.0 * b.squeeze_r).cosh();
        let x = omega / (2.0 * b.temperature);
        if x.abs() < 1e-6 {
            // Im χ̃/ħ · coth with both factors expanded around ω = 0.
            let j_over_w = match b.kind {
                model::SpectralKind::Ohmic => {
                    0.5 * std::f64::consts::PI
                        * self.cfg.mass
                        * b.gamma
                        * (-omega.abs() / b.omega_c).exp()
                }
                model::SpectralKind::SuperOhmic => {
                    0.5 * std::f64::consts::PI * self.cfg.mass * b.gamma * omega.abs() / b.omega_c
                }
            };
            let coth_times_w = 2.0 * b.temperature + omega * omega / (6.0 * b.temperature);
            j_over_w * coth_times_w * boost
        } else {
            let coth = 1.0 / x.tanh();
            self.susc[l].imag(omega) * coth * boost
        }
    }

    fn noise_comm(&self, l: usize, omega: f64) -> f64 {
        self.susc[l].imag(omega)
    }

    fn weight(a: OpId, b: OpId, mass: f64, omega: f64) -> Complex64 {
        let mut w = Complex64::new(1.0, 0.0);
        if a.is_momentum() {
            w *= Complex64::new(0.0, -mass * omega);
        }
        if b.is_momentum() {
            w *= Complex64::new(0.0, mass * omega);
        }
        w
    }

    fn line_integrand(&self, a: OpId, b: OpId, tau: f64, channel: Channel, omega: f64) -> Complex64 {
        let alpha = match self.green_matrix(omega) {
            Ok(m) => m,
            Err(_) => return Complex64::new(f64::NAN, f64::NAN),
        };
        let i = a.site().index();
        let j = b.site().index();
        let mut m_ij = Complex64::new(0.0, 0.0);
        for l in 0..3 {
            let d = match channel {
                Channel::Sym => self.noise_sym(l, omega),
                Channel::Comm => self.noise_comm(l, omega),
            };
            m_ij += alpha[(i, l)] * alpha[(j, l)].conj() * d;
        }
        let phase = Complex64::new(0.0, -omega * tau).exp();
        phase * Engine::weight(a, b, self.cfg.mass, omega) * m_ij
    }

    fn correlator_impl(
        &self,
        a: OpId,
        b: OpId,
        tau: f64,
        channel: Channel,
    ) -> Result<(f64, f64), SteadyError> {
        // Canonical lag ≥ 0: C_ab(−τ) = C_ba(τ), Y_ab(−τ) = −Y_ba(τ).
        let (a, b, tau, sign) = if tau < 0.0 {
            let s = match channel {
                Channel::Sym => 1.0,
                Channel::Comm => -1.0,
            };
            (b, a, -tau, s)
        } else {
            (a, b, tau + 0.0, 1.0) // normalizes −0.0
        };
        let key = (a, b, tau.to_bits(), channel);
        if let Some(&(value, err)) = self.cache.read().expect("cache poisoned").get(&key) {
            return Ok((sign * value, err));
        }

        let re = quadrature::integrate_line(
            &|w| self.line_integrand(a, b, tau, channel, w).re,
            &self.peaks,
            self.omega_c_max,
            &self.spec,
        )?;
        let im = quadrature::integrate_line(
            &|w| self.line_integrand(a, b, tau, channel, w).im,
            &self.peaks,
            self.omega_c_max,
            &self.spec,
        )?;
        let norm = 0.5 / std::f64::consts::PI;
        let (value, residual, err) = match channel {
            Channel::Sym => (norm * re.value, norm * im.value, norm * re.abs_error),
            // Y = i·y: the line integral is purely imaginary.
            Channel::Comm => (norm * im.value, norm * re.value, norm * im.abs_error),
        };
        let tol = (1e-9 * value.abs()).max(20.0 * norm * (re.abs_error + im.abs_error) + 1e-13);
        if residual.abs() > tol {
            return Err(SteadyError::RealityViolation {
                a,
                b,
                tau,
                value,
                residual: residual.abs(),
            });
        }
        self.cache
            .write()
            .expect("cache poisoned")
            .insert(key, (value, err));
        Ok((sign * value, err))
    }

    /// Symmetrized correlator C_ab(τ) = (1/2)⟨{â(τ), b̂(0)}⟩.
    pub fn correlator(&self, a: OpId, b: OpId, tau: f64) -> Result<f64, SteadyError> {
        self.correlator_impl(a, b, tau, Channel::Sym).map(|v| v.0)
    }

    /// Commutator correlator: the real y in (1/2)⟨[â(τ), b̂(0)]⟩ = i·y.
    /// State independent; y_{x p}(0) = ħ/2 per site.
    pub fn commutator_correlator(&self, a: OpId, b: OpId, tau: f64) -> Result<f64, SteadyError> {
        self.correlator_impl(a, b, tau, Channel::Comm).map(|v| v.0)
    }

    /// Correlator plus its quadrature error estimate.
    pub fn correlator_with_error(
        &self,
        a: OpId,
        b: OpId,
        tau: f64,
    ) -> Result<(f64, f64), SteadyError> {
        self.correlator_impl(a, b, tau, Channel::Sym)
    }

    /// Largest quadrature error estimate among all correlators computed so
    /// far on this engine.
    pub fn max_cached_error(&self) -> f64 {
        self.cache
            .read()
            .expect("cache poisoned")
            .values()
            .map(|&(_, e)| e)
            .fold(0.0, f64::max)
    }

    /// Assemble the full 6×6 stationary covariance matrix.
    pub fn covariance(&self) -> Result<CovarianceMatrix, SteadyError> {
        let mut mat = Matrix6::<f64>::zeros();
        let mut max_err = 0.0f64;
        for i in 0..3 {
            for j in i..3 {
                let (si, sj) = (Site::from_index(i), Site::from_index(j));
                let (cxx, e1) =
                    self.correlator_impl(OpId::X(si), OpId::X(sj), 0.0, Channel::Sym)?;
                let (cpp, e2) =
                    self.correlator_impl(OpId::P(si), OpId::P(sj), 0.0, Channel::Sym)?;
                mat[(i, j)] = cxx;
                mat[(j, i)] = cxx;
                mat[(3 + i, 3 + j)] = cpp;
                mat[(3 + j, 3 + i)] = cpp;
                max_err = max_err.max(e1).max(e2);
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let (si, sj) = (Site::from_index(i), Site::from_index(j));
                let (cxp, e) = self.correlator_impl(OpId::X(si), OpId::P(sj), 0.0, Channel::Sym)?;
                mat[(i, 3 + j)] = cxp;
                mat[(3 + j, i)] = cxp;
                max_err = max_err.max(e);
            }
        }
        // Stationarity of ⟨x_i²⟩ forces the diagonal x-p correlators to vanish.
        for i in 0..3 {
            let v = mat[(i, 3 + i)];
            if v.abs() > (1e-7f64).max(100.0 * max_err) {
                return Err(SteadyError::PhysicalityViolation(format!(
                    "C_xp[{i},{i}] = {v} should vanish in the stationary state"
                )));
            }
        }
        let cov = CovarianceMatrix {
            mat,
            max_abs_error: max_err,
        };
        let min_eig = cov.min_uncertainty_eigenvalue();
        if min_eig < -1e-6 {
            return Err(SteadyError::PhysicalityViolation(format!(
                "uncertainty relation violated: min eig(σ + iΩ) = {min_eig}"
            )));
        }
        Ok(cov)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{presets, BathConfig, SpectralKind};
    use approx::assert_relative_eq;

    fn fig1(kind: SpectralKind) -> SystemConfig {
        presets::detuned_chain(kind, 0.0).build().unwrap()
    }

    fn single_oscillator(gamma: f64, temperature: f64) -> SystemConfig {
        let bath = BathConfig {
            kind: SpectralKind::Ohmic,
            gamma,
            omega_c: 20.0,
            temperature,
            squeeze_r: 0.0,
            squeeze_theta: 0.0,
        };
        SystemConfig::new([1.0, 1.0, 1.0], 0.0, 1.0, [bath; 3]).unwrap()
    }

    #[test]
    fn stationarity_reference_pass_and_cutoff_violation() {
        let report = stationarity_check(&fig1(SpectralKind::Ohmic));
        assert!(report.pass, "{report:?}");
        assert!(report.cutoff_margin > 5.0);

        let mut cfg = fig1(SpectralKind::Ohmic);
        for b in cfg.baths.iter_mut() {
            b.omega_c = 0.1;
        }
        let report = stationarity_check(&cfg);
        assert!(!report.pass);
        assert!(report.violations[0].contains("cutoff"));
        assert!(matches!(
            Engine::new(cfg),
            Err(SteadyError::NotStationary(_))
        ));
    }

    #[test]
    fn stationarity_margin_warning_when_coupling_grows() {
        // Push k until a dressed frequency crosses ω_c / 5.
        let mut cfg = fig1(SpectralKind::Ohmic);
        let mut warned = false;
        for k in [1.8, 4.0, 8.0, 12.0, 15.0] {
            cfg.coupling_k = k;
            let report = stationarity_check(&cfg);
            if report.pass && !report.warnings.is_empty() {
                warned = true;
                break;
            }
        }
        assert!(warned, "no margin warning up to k = 15");
    }

    #[test]
    fn green_matrix_static_decoupled_diagonal() {
        let mut cfg = single_oscillator(1e-10, 1.0);
        cfg.omega = [0.9, 1.1, 1.3];
        let engine = Engine::new(cfg.clone()).unwrap();
        let g = engine.green_matrix(0.0).unwrap();
        for i in 0..3 {
            assert_relative_eq!(
                g[(i, i)].re,
                1.0 / (cfg.mass * cfg.omega[i] * cfg.omega[i]),
                max_relative = 1e-8
            );
            assert!(g[(i, i)].im.abs() < 1e-12);
            for j in 0..3 {
                if i != j {
                    assert!(g[(i, j)].norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn green_matrix_inverse_residual_and_symmetry() {
        let engine = Engine::new(fig1(SpectralKind::Ohmic)).unwrap();
        let omega = 2.0;
        let g = engine.green_matrix(omega).unwrap();
        // Rebuild Γ+U and check α̃(Γ+U) = 1.
        let u = model::coupling_matrix(engine.cfg.coupling_k);
        let mut a = u.map(|x| Complex64::new(x, 0.0));
        for i in 0..3 {
            let real = engine.cfg.omega[i] * engine.cfg.omega[i]
                + engine.cfg.baths[i].frequency_shift()
                - omega * omega;
            a[(i, i)] += Complex64::new(real, 0.0) - engine.susc[i].eval(omega);
        }
        let residual = g * a - Matrix3::identity().map(|x: f64| Complex64::new(x, 0.0));
        assert!(residual.iter().all(|z| z.norm() < 1e-12), "{residual}");
        // Symmetric and conjugate-symmetric in ω.
        for &w in &[0.3, 0.65, 1.7, 5.0] {
            let gp = engine.green_matrix(w).unwrap();
            let gm = engine.green_matrix(-w).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (gp[(i, j)] - gp[(j, i)]).norm() < 1e-13 * gp[(i, j)].norm().max(1e-6)
                    );
                    assert!((gm[(i, j)] - gp[(i, j)].conj()).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn canonical_commutator_recovered() {
        let engine = Engine::new(fig1(SpectralKind::Ohmic)).unwrap();
        for site in Site::ALL {
            let y = engine
                .commutator_correlator(OpId::X(site), OpId::P(site), 0.0)
                .unwrap();
            assert_relative_eq!(y, 0.5, max_relative = 1e-6);
            let yxx = engine
                .commutator_correlator(OpId::X(site), OpId::X(Site::Center), 0.0)
                .unwrap();
            assert!(yxx.abs() < 1e-9);
        }
    }

    #[test]
    fn commutator_is_state_independent() {
        let a = Engine::new(fig1(SpectralKind::SuperOhmic)).unwrap();
        let mut hot = fig1(SpectralKind::SuperOhmic);
        for b in hot.baths.iter_mut() {
            b.temperature *= 7.0;
            b.squeeze_r = 1.3;
        }
        let b = Engine::new(hot).unwrap();
        for &tau in &[0.0, 0.7] {
            for op in [OpId::X(Site::Left), OpId::P(Site::Right)] {
                let ya = a
                    .commutator_correlator(op, OpId::P(Site::Center), tau)
                    .unwrap();
                let yb = b
                    .commutator_correlator(op, OpId::P(Site::Center), tau)
                    .unwrap();
                assert!((ya - yb).abs() < 1e-10, "tau={tau} {ya} vs {yb}");
            }
        }
    }

    #[test]
    fn decoupled_cross_correlators_vanish() {
        let engine = Engine::new(single_oscillator(1e-4, 0.27)).unwrap();
        let c = engine
            .correlator(OpId::X(Site::Left), OpId::X(Site::Right), 0.0)
            .unwrap();
        assert!(c.abs() < 1e-12);
        let c = engine
            .correlator(OpId::X(Site::Left), OpId::P(Site::Center), 0.5)
            .unwrap();
        assert!(c.abs() < 1e-12);
    }

    #[test]
    fn equipartition_and_ground_state_oracles() {
        // Classical limit: m ω_eff² ⟨x²⟩ = k_B T within 1%.
        let engine = Engine::new(single_oscillator(1e-4, 20.0)).unwrap();
        let cxx = engine
            .correlator(OpId::X(Site::Left), OpId::X(Site::Left), 0.0)
            .unwrap();
        let w_eff = engine.peaks.centers[0];
        assert_relative_eq!(w_eff * w_eff * cxx / 20.0, 1.0, max_relative = 0.01);

        // Deep quantum limit: ⟨x²⟩ = ħ/(2mω) within 1%.
        let engine = Engine::new(single_oscillator(1e-4, 0.01)).unwrap();
        let cxx = engine
            .correlator(OpId::X(Site::Left), OpId::X(Site::Left), 0.0)
            .unwrap();
        let w_eff = engine.peaks.centers[0];
        assert_relative_eq!(2.0 * w_eff * cxx, 1.0, max_relative = 0.01);
    }

    #[test]
    fn covariance_thermal_block_diagonal() {
        let engine = Engine::new(single_oscillator(1e-3, 0.8)).unwrap();
        let v = engine.covariance().unwrap();
        for i in Site::ALL {
            for j in Site::ALL {
                if i != j {
                    assert!(v.xx(i, j).abs() < 1e-10);
                    assert!(v.pp(i, j).abs() < 1e-10);
                }
                assert!(v.xp(i, j).abs() < 1e-8);
            }
            assert!(v.xx(i, i) > 0.0 && v.pp(i, i) > 0.0);
        }
        // Thermal single mode: ⟨x²⟩ ≈ coth(ω/2T)/2 at ω_eff ≈ 1.
        let n_expected = 0.5 / (1.0f64 / (2.0 * 0.8)).tanh();
        assert_relative_eq!(
            v.xx(Site::Left, Site::Left),
            n_expected,
            max_relative = 2e-3
        );
        assert_relative_eq!(
            v.pp(Site::Left, Site::Left),
            n_expected,
            max_relative = 2e-3
        );
    }

    #[test]
    fn covariance_uncertainty_and_reflection() {
        let cfg = fig1(SpectralKind::Ohmic);
        let v = Engine::new(cfg.clone()).unwrap().covariance().unwrap();
        assert!(v.min_uncertainty_eigenvalue() > -1e-9);

        let vr = Engine::new(cfg.reflected()).unwrap().covariance().unwrap();
        let back = vr.reflected();
        for r in 0..6 {
            for c in 0..6 {
                assert!(
                    (back.matrix()[(r, c)] - v.matrix()[(r, c)]).abs() < 1e-7,
                    "entry ({r},{c})"
                );
            }
        }
    }

    #[test]
    fn squeezing_raises_central_variance() {
        let base = Engine::new(fig1(SpectralKind::Ohmic)).unwrap();
        let mut squeezed_cfg = fig1(SpectralKind::Ohmic);
        squeezed_cfg.baths[1].squeeze_r = 1.0;
        let squeezed = Engine::new(squeezed_cfg).unwrap();
        let c0 = base
            .correlator(OpId::X(Site::Center), OpId::X(Site::Center), 0.0)
            .unwrap();
        let c1 = squeezed
            .correlator(OpId::X(Site::Center), OpId::X(Site::Center), 0.0)
            .unwrap();
        assert!(
            c1 > c0,
            "squeezing must act as effective heating: {c1} vs {c0}"
        );
    }

    #[test]
    fn squeezing_matches_cosh_scaling_in_classical_regime() {
        // k_BT/ħΩ ≥ 10: the noise sourced by bath l scales by cosh(2r_l).
        let mut cfg = single_oscillator(1e-4, 15.0);
        cfg.baths[0].squeeze_r = 0.7;
        let plain = Engine::new(single_oscillator(1e-4, 15.0)).unwrap();
        let squeezed = Engine::new(cfg).unwrap();
        let c0 = plain
            .correlator(OpId::X(Site::Left), OpId::X(Site::Left), 0.0)
            .unwrap();
        let c1 = squeezed
            .correlator(OpId::X(Site::Left), OpId::X(Site::Left), 0.0)
            .unwrap();
        assert_relative_eq!(c1 / c0, (2.0f64 * 0.7).cosh(), max_relative = 0.02);
    }

    #[test]
    fn squeeze_phase_never_enters() {
        let mut cfg = fig1(SpectralKind::Ohmic);
        cfg.baths[0].squeeze_r = 0.9;
        let a = Engine::new(cfg.clone()).unwrap();
        cfg.baths[0].squeeze_theta = 2.2;
        cfg.baths[1].squeeze_theta = -1.0;
        let b = Engine::new(cfg).unwrap();
        let ca = a
            .correlator(OpId::X(Site::Left), OpId::P(Site::Right), 0.3)
            .unwrap();
        let cb = b
            .correlator(OpId::X(Site::Left), OpId::P(Site::Right), 0.3)
            .unwrap();
        assert_eq!(ca, cb);
    }

    #[test]
    fn lag_symmetries() {
        let engine = Engine::new(fig1(SpectralKind::Ohmic)).unwrap();
        let (a, b) = (OpId::X(Site::Left), OpId::P(Site::Center));
        let tau = 1.3;
        let c1 = engine.correlator(a, b, -tau).unwrap();
        let c2 = engine.correlator(b, a, tau).unwrap();
        assert_relative_eq!(c1, c2, max_relative = 1e-12);
        let y1 = engine.commutator_correlator(a, b, -tau).unwrap();
        let y2 = engine.commutator_correlator(b, a, tau).unwrap();
        assert_relative_eq!(y1, -y2, max_relative = 1e-12);
    }
}
