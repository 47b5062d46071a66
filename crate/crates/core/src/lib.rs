//! Stationary Gaussian physics of a damped three-oscillator harmonic chain.
//!
//! Three harmonic oscillators (left, center, right) are coupled in a line with
//! spring constant `k` and each one is damped by its own independent squeezed
//! thermal reservoir. The library computes the exact stationary state of the
//! chain from the generalized Langevin equation: the 6×6 covariance matrix,
//! two-time correlation functions, energy-current means and fluctuations, and
//! Gaussian quantum-correlation measures (logarithmic negativity, discord,
//! multipartite separability tests) evaluated on that state.
//!
//! Internal units fix ħ = k_B = m = Ω = 1, matching the dimensionless ratios
//! used throughout the public API (k/mΩ², k_BT/ħΩ, γ/Ω, ...).

pub mod measures;
pub mod model;
pub mod quadrature;
pub mod spectral;
pub mod steady;
pub mod transport;

pub use model::{BathConfig, PhysicalParams, Site, SpectralKind, SystemConfig};
pub use steady::{CovarianceMatrix, Engine, OpId};
