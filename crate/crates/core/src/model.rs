//! System description: chain frequencies, coupling, bath parameters, units.
//!
//! Everything downstream consumes a validated [`SystemConfig`]. All quantities
//! are dimensionless ratios in units of a reference frequency Ω with
//! ħ = k_B = 1: frequencies in Ω, temperatures in ħΩ/k_B, spring constants in
//! mΩ². [`PhysicalParams`] converts laboratory values into these units.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// CODATA value of the reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Exact SI Boltzmann constant, J/K.
pub const KB_SI: f64 = 1.380_649e-23;

/// Chain site label. The chain is ordered left–center–right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Site {
    Left,
    Center,
    Right,
}

impl Site {
    pub const ALL: [Site; 3] = [Site::Left, Site::Center, Site::Right];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Site::Left => 0,
            Site::Center => 1,
            Site::Right => 2,
        }
    }

    pub fn from_index(i: usize) -> Site {
        Site::ALL[i]
    }

    /// Mirror image under the left–right reflection of the chain.
    pub fn reflected(self) -> Site {
        match self {
            Site::Left => Site::Right,
            Site::Center => Site::Center,
            Site::Right => Site::Left,
        }
    }
}

/// Low-frequency behavior of a bath spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralKind {
    /// J(ω) ∝ ω e^(−ω/ω_c)
    Ohmic,
    /// J(ω) ∝ (ω²/ω_c) e^(−ω/ω_c)
    SuperOhmic,
}

/// One independent reservoir: spectral density shape plus initial squeezed
/// thermal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathConfig {
    pub kind: SpectralKind,
    /// Dissipative rate γ, units of Ω.
    pub gamma: f64,
    /// Spectral cutoff ω_c, units of Ω.
    pub omega_c: f64,
    /// Temperature, units of ħΩ/k_B.
    #[serde(rename = "T")]
    pub temperature: f64,
    /// Squeezing amplitude r ≥ 0 of the initial bath state.
    #[serde(rename = "r", default)]
    pub squeeze_r: f64,
    /// Squeezing phase θ ∈ (−π, π]. Stored for completeness; it drops out of
    /// every stationary quantity (only cosh 2r survives in the long-time
    /// noise spectrum), so no output depends on it.
    #[serde(rename = "theta", default)]
    pub squeeze_theta: f64,
}

/// Validated description of the chain and its three reservoirs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemConfig {
    /// Bare oscillator frequencies (ω_L, ω_C, ω_R), units of Ω.
    pub omega: [f64; 3],
    /// Nearest-neighbor spring constant k ≥ 0, units of mΩ².
    #[serde(rename = "k")]
    pub coupling_k: f64,
    /// Oscillator mass, internal units (default 1).
    pub mass: f64,
    pub baths: [BathConfig; 3],
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration document does not parse: {0}")]
    Parse(String),
    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("parameter `{name}` must be {requirement}, got {value}")]
    NonPositiveParameter {
        name: String,
        requirement: &'static str,
        value: f64,
    },
    #[error("unknown spectral kind `{0}` (expected \"ohmic\" or \"super_ohmic\")")]
    UnknownSpectralKind(String),
    #[error("field `{name}` must have exactly {expected} entries, found {found}")]
    WrongCount {
        name: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("effective potential is not positive definite (eigenvalue {value})")]
    NegativeEigenvalue { value: f64 },
}

impl BathConfig {
    fn check(&self, label: &str) -> Result<(), ConfigError> {
        let positive = |name: &str, v: f64| -> Result<(), ConfigError> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::NonPositiveParameter {
                    name: format!("{label}.{name}"),
                    requirement: "> 0",
                    value: v,
                })
            }
        };
        positive("gamma", self.gamma)?;
        positive("omega_c", self.omega_c)?;
        positive("T", self.temperature)?;
        if !(self.squeeze_r >= 0.0 && self.squeeze_r.is_finite()) {
            return Err(ConfigError::NonPositiveParameter {
                name: format!("{label}.r"),
                requirement: ">= 0",
                value: self.squeeze_r,
            });
        }
        Ok(())
    }

    /// Frequency renormalization ΔΩ = (2/πm) ∫₀^∞ J(ω)/ω dω, units of Ω².
    ///
    /// The integral evaluates to γ ω_c for both supported spectral kinds
    /// (m cancels against the m inside J).
    pub fn frequency_shift(&self) -> f64 {
        self.gamma * self.omega_c
    }
}

impl SystemConfig {
    /// Build a configuration, enforcing every invariant.
    pub fn new(
        omega: [f64; 3],
        coupling_k: f64,
        mass: f64,
        baths: [BathConfig; 3],
    ) -> Result<Self, ConfigError> {
        for (i, &w) in omega.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(ConfigError::NonPositiveParameter {
                    name: format!("omega[{i}]"),
                    requirement: "> 0",
                    value: w,
                });
            }
        }
        if !(coupling_k >= 0.0 && coupling_k.is_finite()) {
            return Err(ConfigError::NonPositiveParameter {
                name: "k".into(),
                requirement: ">= 0",
                value: coupling_k,
            });
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(ConfigError::NonPositiveParameter {
                name: "mass".into(),
                requirement: "> 0",
                value: mass,
            });
        }
        let mut baths = baths;
        for (i, b) in baths.iter_mut().enumerate() {
            b.check(&format!("baths[{i}]"))?;
            // Wrap the squeezing phase into (−π, π].
            let mut th = b.squeeze_theta.rem_euclid(2.0 * std::f64::consts::PI);
            if th > std::f64::consts::PI {
                th -= 2.0 * std::f64::consts::PI;
            }
            b.squeeze_theta = th;
        }
        Ok(SystemConfig {
            omega,
            coupling_k,
            mass,
            baths,
        })
    }

    pub fn bath(&self, site: Site) -> &BathConfig {
        &self.baths[site.index()]
    }

    /// The configuration with left and right oscillators (and their baths)
    /// exchanged. Physical observables must transform covariantly under this
    /// relabeling.
    pub fn reflected(&self) -> SystemConfig {
        SystemConfig {
            omega: [self.omega[2], self.omega[1], self.omega[0]],
            coupling_k: self.coupling_k,
            mass: self.mass,
            baths: [self.baths[2], self.baths[1], self.baths[0]],
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawBath {
    kind: Option<String>,
    gamma: Option<f64>,
    omega_c: Option<f64>,
    #[serde(rename = "T")]
    temperature: Option<f64>,
    #[serde(rename = "r")]
    squeeze_r: Option<f64>,
    #[serde(rename = "theta")]
    squeeze_theta: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct RawDoc {
    omega: Option<Vec<f64>>,
    k: Option<f64>,
    mass: Option<f64>,
    baths: Option<Vec<RawBath>>,
}

fn parse_kind(s: &str) -> Result<SpectralKind, ConfigError> {
    match s {
        "ohmic" => Ok(SpectralKind::Ohmic),
        "super_ohmic" => Ok(SpectralKind::SuperOhmic),
        other => Err(ConfigError::UnknownSpectralKind(other.to_string())),
    }
}

/// Parse and validate a JSON configuration document.
///
/// Expected shape:
/// ```json
/// {
///   "omega": [1.2, 1.45, 0.65],
///   "k": 1.8,
///   "mass": 1.0,
///   "baths": [
///     { "kind": "ohmic", "gamma": 1e-4, "omega_c": 20.0,
///       "T": 0.5265, "r": 0.0, "theta": 0.0 },
///     ...
///   ]
/// }
/// ```
/// `mass`, `r` and `theta` are optional (defaults 1, 0, 0).
pub fn validate(raw: &str) -> Result<SystemConfig, ConfigError> {
    let doc: RawDoc = serde_json::from_str(raw).map_err(|e| ConfigError::Parse(e.to_string()))?;
    validate_doc(doc)
}

/// Same as [`validate`] but starting from an already-parsed JSON value.
pub fn validate_value(raw: serde_json::Value) -> Result<SystemConfig, ConfigError> {
    let doc: RawDoc =
        serde_json::from_value(raw).map_err(|e| ConfigError::Parse(e.to_string()))?;
    validate_doc(doc)
}

fn validate_doc(doc: RawDoc) -> Result<SystemConfig, ConfigError> {
    let omega_vec = doc
        .omega
        .ok_or_else(|| ConfigError::MissingField("omega".into()))?;
    if omega_vec.len() != 3 {
        return Err(ConfigError::WrongCount {
            name: "omega".into(),
            expected: 3,
            found: omega_vec.len(),
        });
    }
    let k = doc.k.ok_or_else(|| ConfigError::MissingField("k".into()))?;
    let baths_vec = doc
        .baths
        .ok_or_else(|| ConfigError::MissingField("baths".into()))?;
    if baths_vec.len() != 3 {
        return Err(ConfigError::WrongCount {
            name: "baths".into(),
            expected: 3,
            found: baths_vec.len(),
        });
    }
    let mut baths = Vec::with_capacity(3);
    for (i, rb) in baths_vec.into_iter().enumerate() {
        let field = |name: &str| ConfigError::MissingField(format!("baths[{i}].{name}"));
        let kind = parse_kind(&rb.kind.ok_or_else(|| field("kind"))?)?;
        baths.push(BathConfig {
            kind,
            gamma: rb.gamma.ok_or_else(|| field("gamma"))?,
            omega_c: rb.omega_c.ok_or_else(|| field("omega_c"))?,
            temperature: rb.temperature.ok_or_else(|| field("T"))?,
            squeeze_r: rb.squeeze_r.unwrap_or(0.0),
            squeeze_theta: rb.squeeze_theta.unwrap_or(0.0),
        });
    }
    SystemConfig::new(
        [omega_vec[0], omega_vec[1], omega_vec[2]],
        k,
        doc.mass.unwrap_or(1.0),
        [baths[0], baths[1], baths[2]],
    )
}

/// Interaction matrix U of the isolated chain:
/// U = (1/2) [[k, −k, 0], [−k, 2k, −k], [0, −k, k]].
///
/// Symmetric, positive semidefinite, rows sum to zero; the interaction energy
/// is Σ_ij U_ij x_i x_j = (k/2)[(x_L−x_C)² + (x_C−x_R)²].
pub fn coupling_matrix(k: f64) -> Matrix3<f64> {
    0.5 * Matrix3::new(k, -k, 0.0, -k, 2.0 * k, -k, 0.0, -k, k)
}

/// Small-oscillation frequencies of the renormalized chain potential:
/// square roots of the eigenvalues of diag(ω_i² + ΔΩ_i) + U/m, ascending.
///
/// These locate the resonance peaks of the stationary spectra.
pub fn dressed_frequencies(cfg: &SystemConfig) -> Result<[f64; 3], ModelError> {
    let mut m = coupling_matrix(cfg.coupling_k) / cfg.mass;
    for i in 0..3 {
        m[(i, i)] += cfg.omega[i] * cfg.omega[i] + cfg.baths[i].frequency_shift();
    }
    let eig = SymmetricEigen::new(m);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    if vals[0] <= 0.0 {
        return Err(ModelError::NegativeEigenvalue { value: vals[0] });
    }
    Ok([vals[0].sqrt(), vals[1].sqrt(), vals[2].sqrt()])
}

/// Normal modes of the renormalized potential: `(frequency, eigenvector)`
/// pairs sorted by ascending frequency.
pub(crate) fn normal_modes(cfg: &SystemConfig) -> Result<[(f64, [f64; 3]); 3], ModelError> {
    let mut m = coupling_matrix(cfg.coupling_k) / cfg.mass;
    for i in 0..3 {
        m[(i, i)] += cfg.omega[i] * cfg.omega[i] + cfg.baths[i].frequency_shift();
    }
    let eig = SymmetricEigen::new(m);
    let mut modes: Vec<(f64, [f64; 3])> = (0..3)
        .map(|j| {
            let v = eig.eigenvectors.column(j);
            (eig.eigenvalues[j], [v[0], v[1], v[2]])
        })
        .collect();
    modes.sort_by(|a, b| a.0.total_cmp(&b.0));
    if modes[0].0 <= 0.0 {
        return Err(ModelError::NegativeEigenvalue { value: modes[0].0 });
    }
    Ok([
        (modes[0].0.sqrt(), modes[0].1),
        (modes[1].0.sqrt(), modes[1].1),
        (modes[2].0.sqrt(), modes[2].1),
    ])
}

/// Laboratory-frame description of the chain, converted to internal units by
/// [`to_dimensionless`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Reference angular frequency Ω in rad/s.
    pub omega_ref: f64,
    /// Oscillator mass in kg.
    pub mass_kg: f64,
    /// Bath temperatures in kelvin.
    pub temperatures_k: [f64; 3],
    /// ω_i/Ω.
    pub omega_ratio: [f64; 3],
    /// k/(mΩ²).
    pub coupling_ratio: f64,
    /// γ_i/Ω.
    pub gamma_ratio: [f64; 3],
    /// ω_c/Ω.
    pub omega_c_ratio: f64,
    pub kinds: [SpectralKind; 3],
    pub squeeze_r: [f64; 3],
    pub squeeze_theta: [f64; 3],
}

/// Convert laboratory values to the internal dimensionless configuration.
/// Temperatures map via k_B T / (ħ Ω); the inverse is [`to_physical`].
pub fn to_dimensionless(p: &PhysicalParams) -> Result<SystemConfig, ConfigError> {
    let positive = |name: &str, v: f64| -> Result<(), ConfigError> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(ConfigError::NonPositiveParameter {
                name: name.into(),
                requirement: "> 0",
                value: v,
            })
        }
    };
    positive("omega_ref", p.omega_ref)?;
    positive("mass_kg", p.mass_kg)?;
    for (i, &t) in p.temperatures_k.iter().enumerate() {
        positive(&format!("temperatures_k[{i}]"), t)?;
    }
    let mut baths = [BathConfig {
        kind: SpectralKind::Ohmic,
        gamma: 0.0,
        omega_c: 0.0,
        temperature: 0.0,
        squeeze_r: 0.0,
        squeeze_theta: 0.0,
    }; 3];
    for i in 0..3 {
        baths[i] = BathConfig {
            kind: p.kinds[i],
            gamma: p.gamma_ratio[i],
            omega_c: p.omega_c_ratio,
            temperature: KB_SI * p.temperatures_k[i] / (HBAR_SI * p.omega_ref),
            squeeze_r: p.squeeze_r[i],
            squeeze_theta: p.squeeze_theta[i],
        };
    }
    SystemConfig::new(p.omega_ratio, p.coupling_ratio, 1.0, baths)
}

/// Inverse of [`to_dimensionless`] for a given reference frequency and mass.
pub fn to_physical(cfg: &SystemConfig, omega_ref: f64, mass_kg: f64) -> PhysicalParams {
    let t_k = |t: f64| t * HBAR_SI * omega_ref / KB_SI;
    PhysicalParams {
        omega_ref,
        mass_kg,
        temperatures_k: [
            t_k(cfg.baths[0].temperature),
            t_k(cfg.baths[1].temperature),
            t_k(cfg.baths[2].temperature),
        ],
        omega_ratio: cfg.omega,
        coupling_ratio: cfg.coupling_k,
        gamma_ratio: [cfg.baths[0].gamma, cfg.baths[1].gamma, cfg.baths[2].gamma],
        omega_c_ratio: cfg.baths[0].omega_c,
        kinds: [cfg.baths[0].kind, cfg.baths[1].kind, cfg.baths[2].kind],
        squeeze_r: [
            cfg.baths[0].squeeze_r,
            cfg.baths[1].squeeze_r,
            cfg.baths[2].squeeze_r,
        ],
        squeeze_theta: [
            cfg.baths[0].squeeze_theta,
            cfg.baths[1].squeeze_theta,
            cfg.baths[2].squeeze_theta,
        ],
    }
}

pub mod presets {
    //! Ready-made chain configurations used by the scan presets and tests.
    //!
    //! The chain frequencies follow the detuning convention
    //! ω_L = 1 + 0.4 δω, ω_C = 1 + 0.9 δω, ω_R = 1 − 0.7 δω and the
    //! temperatures the gradient convention T_L = T(1 + δT/T),
    //! T_C = T(1 + ΔT/T), T_R = T(1 − δT/T).

    use super::{BathConfig, ConfigError, SpectralKind, SystemConfig};

    /// Parameters shared by every preset chain.
    #[derive(Debug, Clone, Copy)]
    pub struct ChainSpec {
        pub kind: SpectralKind,
        /// Detuning δω in units of Ω.
        pub delta_omega: f64,
        /// Spring constant k in units of mΩ².
        pub coupling_k: f64,
        /// Mean side temperature T in units of ħΩ/k_B.
        pub temperature: f64,
        /// Side gradient δT/T.
        pub side_gradient: f64,
        /// Central gradient ΔT/T.
        pub central_gradient: f64,
        /// Bath squeezing amplitudes (r_L, r_C, r_R).
        pub squeeze_r: [f64; 3],
    }

    impl ChainSpec {
        pub fn build(&self) -> Result<SystemConfig, ConfigError> {
            let omega = [
                1.0 + 0.4 * self.delta_omega,
                1.0 + 0.9 * self.delta_omega,
                1.0 - 0.7 * self.delta_omega,
            ];
            let temps = [
                self.temperature * (1.0 + self.side_gradient),
                self.temperature * (1.0 + self.central_gradient),
                self.temperature * (1.0 - self.side_gradient),
            ];
            let gammas = [1e-4, 0.05, 1e-4];
            let mut baths = [BathConfig {
                kind: self.kind,
                gamma: 0.0,
                omega_c: 20.0,
                temperature: 0.0,
                squeeze_r: 0.0,
                squeeze_theta: 0.0,
            }; 3];
            for i in 0..3 {
                baths[i].gamma = gammas[i];
                baths[i].temperature = temps[i];
                baths[i].squeeze_r = self.squeeze_r[i];
            }
            SystemConfig::new(omega, self.coupling_k, 1.0, baths)
        }
    }

    /// Detuned chain at low temperature: k = 1.8, δω = 0.5, δT/T = 0.95,
    /// k_BT/ħΩ = 0.27. `central_gradient` is the scan variable.
    pub fn detuned_chain(kind: SpectralKind, central_gradient: f64) -> ChainSpec {
        ChainSpec {
            kind,
            delta_omega: 0.5,
            coupling_k: 1.8,
            temperature: 0.27,
            side_gradient: 0.95,
            central_gradient,
            squeeze_r: [0.0; 3],
        }
    }

    /// Strongly coupled chain (k = 2) used for the multipartite-entanglement
    /// and current-fluctuation scans; otherwise as [`detuned_chain`].
    pub fn strongly_coupled_chain(kind: SpectralKind, central_gradient: f64) -> ChainSpec {
        ChainSpec {
            coupling_k: 2.0,
            ..detuned_chain(kind, central_gradient)
        }
    }

    /// Warm chain (k_BT/ħΩ = 0.53) with adjustable detuning, used for the
    /// discord scans. `r_center` squeezes the central reservoir.
    pub fn warm_chain(
        kind: SpectralKind,
        delta_omega: f64,
        central_gradient: f64,
        r_center: f64,
    ) -> ChainSpec {
        ChainSpec {
            kind,
            delta_omega,
            coupling_k: 1.8,
            temperature: 0.53,
            side_gradient: 0.95,
            central_gradient,
            squeeze_r: [0.0, r_center, 0.0],
        }
    }
}
