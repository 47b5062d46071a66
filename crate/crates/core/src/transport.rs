//! Stationary energy currents: means, interaction energy, and two-time
//! current–current correlation functions.
//!
//! The current from site j into neighboring site i is
//!
//!   ĵ_ij = (k/4m)[{x_j,p_j} − {x_i,p_i} + {x_j,p_i} − {x_i,p_j}]
//!
//! so its mean needs only equal-time covariance entries. Fluctuations need
//! the Gaussian four-point reduction: every anticommutator pair splits into
//! products of the symmetrized correlators C plus products of the commutator
//! averages Y. Since Y = i·y is stored through its real part y, every Y·Y
//! product contributes −y·y; that sign bookkeeping lives in [`wick_pair`]
//! and nowhere else.

use crate::model::Site;
use crate::steady::{Engine, OpId, SteadyError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("({0:?}, {1:?}) is not a coupled pair; currents flow only between neighbors")]
    InvalidPair(Site, Site),
    #[error(transparent)]
    Steady(#[from] SteadyError),
}

fn check_pair(i: Site, j: Site) -> Result<(), TransportError> {
    use Site::*;
    match (i, j) {
        (Center, Left) | (Left, Center) | (Right, Center) | (Center, Right) => Ok(()),
        _ => Err(TransportError::InvalidPair(i, j)),
    }
}

/// Mean energy current ⟨ĵ_ij⟩ from site j into site i, units ħΩ².
///
/// (k/2m)[C_{x_j p_j} − C_{x_i p_i} + C_{x_j p_i} − C_{x_i p_j}] at equal
/// time; antisymmetric under i ↔ j by construction.
pub fn mean_pair_current(engine: &Engine, i: Site, j: Site) -> Result<f64, TransportError> {
    check_pair(i, j)?;
    let cfg = engine.config();
    let c = |a: OpId, b: OpId| engine.correlator(a, b, 0.0);
    let value = 0.5 * cfg.coupling_k / cfg.mass
        * (c(OpId::X(j), OpId::P(j))? - c(OpId::X(i), OpId::P(i))? + c(OpId::X(j), OpId::P(i))?
            - c(OpId::X(i), OpId::P(j))?);
    Ok(value)
}

/// Mean total current from the left to the right end of the chain:
/// ⟨Ĵ⟩ = ⟨ĵ_CL⟩ + ⟨ĵ_RC⟩. Never involves the side–side correlators.
pub fn total_current(engine: &Engine) -> Result<f64, TransportError> {
    Ok(mean_pair_current(engine, Site::Center, Site::Left)?
        + mean_pair_current(engine, Site::Right, Site::Center)?)
}

/// Mean interaction energy of the chain, units ħΩ:
/// ⟨Ĥ_I⟩ = (k/2)[C_LL + 2C_CC + C_RR − 2(C_LC + C_RC)] over positions.
/// Nonnegative (the coupling quadratic form is positive semidefinite).
pub fn interaction_energy(engine: &Engine) -> Result<f64, TransportError> {
    let cfg = engine.config();
    let xx = |i: Site, j: Site| engine.correlator(OpId::X(i), OpId::X(j), 0.0);
    use Site::*;
    let value = 0.5
        * cfg.coupling_k
        * (xx(Left, Left)? + 2.0 * xx(Center, Center)? + xx(Right, Right)?
            - 2.0 * (xx(Left, Center)? + xx(Right, Center)?));
    Ok(value)
}

/// Correlator bundle for one (α,β)×(α′,β′) term pair of the current
/// expansion, at lag τ.
struct PairCorrelators {
    c_xx: f64,
    y_xx: f64,
    c_pp: f64,
    y_pp: f64,
    /// C_{x_α p_β′}(τ)
    c_xp_t: f64,
    y_xp_t: f64,
    /// C_{x_α′ p_β}(−τ)
    c_xp_mt: f64,
    y_xp_mt: f64,
}

/// Gaussian four-point reduction of one anticommutator term pair:
///
///   (1/2)⟨{{x_α(τ),p_β(τ)}, {x_α′(0),p_β′(0)}}⟩ − ⟨{x_α,p_β}⟩⟨{x_α′,p_β′}⟩
///     = 4 [ C_xx C_pp + Y_xx Y_pp + C_xp(τ) C_x′p(−τ) − Y_xp(τ) Y_x′p(−τ) ]
///
/// written in terms of the stored y's (Y = i·y), so each Y·Y product flips
/// sign: +Y_xx Y_pp → −y_xx y_pp and −Y_xp Y_x′p → +y_xp y_x′p.
fn wick_pair(p: &PairCorrelators, include_commutators: bool) -> f64 {
    let quantum = if include_commutators {
        -p.y_xx * p.y_pp + p.y_xp_t * p.y_xp_mt
    } else {
        0.0
    };
    4.0 * (p.c_xx * p.c_pp + p.c_xp_t * p.c_xp_mt + quantum)
}

fn gather(
    engine: &Engine,
    alpha: Site,
    beta: Site,
    alpha2: Site,
    beta2: Site,
    tau: f64,
) -> Result<PairCorrelators, SteadyError> {
    let c = |a: OpId, b: OpId, t: f64| engine.correlator(a, b, t);
    let y = |a: OpId, b: OpId, t: f64| engine.commutator_correlator(a, b, t);
    Ok(PairCorrelators {
        c_xx: c(OpId::X(alpha), OpId::X(alpha2), tau)?,
        y_xx: y(OpId::X(alpha), OpId::X(alpha2), tau)?,
        c_pp: c(OpId::P(beta), OpId::P(beta2), tau)?,
        y_pp: y(OpId::P(beta), OpId::P(beta2), tau)?,
        c_xp_t: c(OpId::X(alpha), OpId::P(beta2), tau)?,
        y_xp_t: y(OpId::X(alpha), OpId::P(beta2), tau)?,
        c_xp_mt: c(OpId::X(alpha2), OpId::P(beta), -tau)?,
        y_xp_mt: y(OpId::X(alpha2), OpId::P(beta), -tau)?,
    })
}

// ĵ_ij expands into four {x_α, p_β} terms with signs.
fn current_terms(i: Site, j: Site) -> [(Site, Site, f64); 4] {
    [(j, j, 1.0), (i, i, -1.0), (j, i, 1.0), (i, j, -1.0)]
}

fn correlation_impl(
    engine: &Engine,
    pair1: (Site, Site),
    pair2: (Site, Site),
    tau: f64,
    include_commutators: bool,
) -> Result<f64, TransportError> {
    check_pair(pair1.0, pair1.1)?;
    check_pair(pair2.0, pair2.1)?;
    let cfg = engine.config();
    let pref = cfg.coupling_k / (4.0 * cfg.mass);
    let mut sum = 0.0;
    for (alpha, beta, s1) in current_terms(pair1.0, pair1.1) {
        for (alpha2, beta2, s2) in current_terms(pair2.0, pair2.1) {
            let p = gather(engine, alpha, beta, alpha2, beta2, tau)?;
            sum += s1 * s2 * wick_pair(&p, include_commutators);
        }
    }
    Ok(pref * pref * sum)
}

/// Two-time current correlation
/// K(τ) = (1/2)⟨{ĵ_p1(τ), ĵ_p2(0)}⟩ − ⟨ĵ_p1⟩⟨ĵ_p2⟩, units (ħΩ²)².
pub fn current_correlation(
    engine: &Engine,
    pair1: (Site, Site),
    pair2: (Site, Site),
    tau: f64,
) -> Result<f64, TransportError> {
    correlation_impl(engine, pair1, pair2, tau, true)
}

/// [`current_correlation`] with every commutator (Y·Y) product dropped.
/// Diagnostic for the ħ-suppressed part: in the classical regime the
/// difference from the full value is small.
pub fn current_correlation_no_commutators(
    engine: &Engine,
    pair1: (Site, Site),
    pair2: (Site, Site),
    tau: f64,
) -> Result<f64, TransportError> {
    correlation_impl(engine, pair1, pair2, tau, false)
}

/// Autocorrelation of the total current:
/// K_JJ(τ) = Σ over the four (CL, RC) pair combinations.
pub fn total_current_correlation(engine: &Engine, tau: f64) -> Result<f64, TransportError> {
    use Site::*;
    let cl = (Center, Left);
    let rc = (Right, Center);
    Ok(current_correlation(engine, cl, cl, tau)?
        + current_correlation(engine, cl, rc, tau)?
        + current_correlation(engine, rc, cl, tau)?
        + current_correlation(engine, rc, rc, tau)?)
}

/// Summary of the stationary transport observables.
#[derive(Debug, Clone)]
pub struct CurrentStats {
    /// ⟨ĵ_CL⟩
    pub j_cl: f64,
    /// ⟨ĵ_RC⟩
    pub j_rc: f64,
    /// ⟨Ĵ⟩ = j_cl + j_rc
    pub total: f64,
    /// ⟨Ĥ_I⟩
    pub h_int: f64,
    /// (τ, K_JJ(τ)) samples.
    pub k_jj: Vec<(f64, f64)>,
}

pub fn current_stats(engine: &Engine, tau_grid: &[f64]) -> Result<CurrentStats, TransportError> {
    let j_cl = mean_pair_current(engine, Site::Center, Site::Left)?;
    let j_rc = mean_pair_current(engine, Site::Right, Site::Center)?;
    let h_int = interaction_energy(engine)?;
    let mut k_jj = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        k_jj.push((tau, total_current_correlation(engine, tau)?));
    }
    Ok(CurrentStats {
        j_cl,
        j_rc,
        total: j_cl + j_rc,
        h_int,
        k_jj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{presets, SpectralKind, SystemConfig};
    use approx::assert_relative_eq;

    fn engine(central_gradient: f64) -> Engine {
        let cfg = presets::detuned_chain(SpectralKind::Ohmic, central_gradient)
            .build()
            .unwrap();
        Engine::new(cfg).unwrap()
    }

    #[test]
    fn equilibrium_carries_no_current() {
        let mut cfg = presets::detuned_chain(SpectralKind::Ohmic, 0.0)
            .build()
            .unwrap();
        for b in cfg.baths.iter_mut() {
            b.temperature = 0.27;
        }
        let engine = Engine::new(cfg).unwrap();
        let j = total_current(&engine).unwrap();
        assert!(j.abs() < 1e-8, "equilibrium current {j}");
    }

    #[test]
    fn pair_current_antisymmetric_and_pairs_checked() {
        let engine = engine(1.0);
        let a = mean_pair_current(&engine, Site::Center, Site::Left).unwrap();
        let b = mean_pair_current(&engine, Site::Left, Site::Center).unwrap();
        assert_eq!(a, -b);
        assert!(matches!(
            mean_pair_current(&engine, Site::Left, Site::Right),
            Err(TransportError::InvalidPair(..))
        ));
    }

    #[test]
    fn symmetric_sides_balance() {
        // δT = 0 with identical side oscillators: j_CL = −j_RC even though
        // ΔT ≠ 0 drives both halves.
        let spec = presets::ChainSpec {
            kind: SpectralKind::Ohmic,
            delta_omega: 0.0,
            coupling_k: 1.8,
            temperature: 0.27,
            side_gradient: 0.0,
            central_gradient: 2.0,
            squeeze_r: [0.0; 3],
        };
        let engine = Engine::new(spec.build().unwrap()).unwrap();
        let j_cl = mean_pair_current(&engine, Site::Center, Site::Left).unwrap();
        let j_rc = mean_pair_current(&engine, Site::Right, Site::Center).unwrap();
        assert!(
            (j_cl + j_rc).abs() < 1e-8,
            "balance violated: {j_cl} vs {j_rc}"
        );
        assert!(j_cl.abs() > 1e-6, "currents should individually flow");
    }

    #[test]
    fn current_reverses_under_reflection() {
        let cfg = presets::detuned_chain(SpectralKind::Ohmic, 1.5)
            .build()
            .unwrap();
        let j = total_current(&Engine::new(cfg.clone()).unwrap()).unwrap();
        let j_reflected = total_current(&Engine::new(cfg.reflected()).unwrap()).unwrap();
        assert_relative_eq!(j, -j_reflected, max_relative = 1e-6);
    }

    #[test]
    fn interaction_energy_zero_at_zero_coupling_and_nonnegative() {
        let bath = crate::model::BathConfig {
            kind: SpectralKind::Ohmic,
            gamma: 1e-3,
            omega_c: 20.0,
            temperature: 0.5,
            squeeze_r: 0.0,
            squeeze_theta: 0.0,
        };
        let cfg = SystemConfig::new([1.0, 1.2, 0.8], 0.0, 1.0, [bath; 3]).unwrap();
        let h = interaction_energy(&Engine::new(cfg).unwrap()).unwrap();
        assert!(h.abs() < 1e-12);

        for grad in [0.0, 2.0] {
            let h = interaction_energy(&engine(grad)).unwrap();
            assert!(h >= 0.0, "H_int = {h} at gradient {grad}");
        }
    }

    #[test]
    fn single_mode_thermal_four_point_identity() {
        // ⟨{x,p}²⟩ = ħ²[(2n̄+1)² + 1] on a thermal state; the Wick reduction
        // must reproduce it exactly from the two-point values
        // c_x c_p = (ħ/2)²(2n̄+1)², y_xp(0) = ħ/2.
        for n_bar in [0.0, 0.5, 1.0, 3.7] {
            let v = 2.0 * n_bar + 1.0;
            let c_x = 0.5 * v;
            let c_p = 0.5 * v;
            let p = PairCorrelators {
                c_xx: c_x,
                y_xx: 0.0,
                c_pp: c_p,
                y_pp: 0.0,
                c_xp_t: 0.0,
                y_xp_t: 0.5,
                c_xp_mt: 0.0,
                y_xp_mt: 0.5,
            };
            let exact = v * v + 1.0;
            assert!((wick_pair(&p, true) - exact).abs() < 1e-10 * exact);
            // Ladder-operator route: ⟨{x,p}²⟩ = 2ħ²[n̄² + (n̄+1)²].
            let ladder = 2.0 * (n_bar * n_bar + (n_bar + 1.0) * (n_bar + 1.0));
            assert!((wick_pair(&p, true) - ladder).abs() < 1e-10 * ladder);
        }
    }

    #[test]
    fn current_variance_nonnegative_and_lag_symmetry() {
        let engine = engine(1.9);
        use Site::*;
        let k0 = total_current_correlation(&engine, 0.0).unwrap();
        assert!(k0 >= 0.0, "K_JJ(0) = {k0}");

        let tau = 0.8;
        let a = current_correlation(&engine, (Center, Left), (Right, Center), tau).unwrap();
        let b = current_correlation(&engine, (Right, Center), (Center, Left), -tau).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-9);
    }

    #[test]
    fn classical_current_depends_on_gradients_not_offset() {
        // Hot regime: shifting all three temperatures by the same constant
        // (differences fixed) barely moves the current.
        let bath = |t: f64| crate::model::BathConfig {
            kind: SpectralKind::Ohmic,
            gamma: 1e-3,
            omega_c: 20.0,
            temperature: t,
            squeeze_r: 0.0,
            squeeze_theta: 0.0,
        };
        let omega = [1.2, 1.45, 0.65];
        let base = SystemConfig::new(omega, 1.8, 1.0, [bath(55.0), bath(52.0), bath(45.0)])
            .unwrap();
        let shifted =
            SystemConfig::new(omega, 1.8, 1.0, [bath(60.0), bath(57.0), bath(50.0)]).unwrap();
        let j0 = total_current(&Engine::new(base).unwrap()).unwrap();
        let j1 = total_current(&Engine::new(shifted).unwrap()).unwrap();
        assert!(
            ((j1 - j0) / j0).abs() < 0.02,
            "offset moved the classical current: {j0} -> {j1}"
        );
    }

    #[test]
    fn relabeled_currents_give_identical_fluctuations() {
        // ĵ_LC = −ĵ_CL, so the sign squares away in the autocorrelation; the
        // expansion must agree through a completely different term order.
        let engine = engine(0.7);
        use Site::*;
        for tau in [0.0, 1.1] {
            let a = current_correlation(&engine, (Center, Left), (Center, Left), tau).unwrap();
            let b = current_correlation(&engine, (Left, Center), (Left, Center), tau).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
            let c = current_correlation(&engine, (Center, Left), (Right, Center), tau).unwrap();
            let d = current_correlation(&engine, (Left, Center), (Center, Right), tau).unwrap();
            assert_relative_eq!(c, d, max_relative = 1e-12);
        }
    }

    #[test]
    fn commutator_products_are_hbar_suppressed_when_hot() {
        let spec = presets::ChainSpec {
            kind: SpectralKind::Ohmic,
            delta_omega: 0.5,
            coupling_k: 1.8,
            temperature: 50.0,
            side_gradient: 0.1,
            central_gradient: 0.2,
            squeeze_r: [0.0; 3],
        };
        let engine = Engine::new(spec.build().unwrap()).unwrap();
        let full = total_current_correlation(&engine, 0.0).unwrap();
        use Site::*;
        let cl = (Center, Left);
        let rc = (Right, Center);
        let no_y = current_correlation_no_commutators(&engine, cl, cl, 0.0).unwrap()
            + current_correlation_no_commutators(&engine, cl, rc, 0.0).unwrap()
            + current_correlation_no_commutators(&engine, rc, cl, 0.0).unwrap()
            + current_correlation_no_commutators(&engine, rc, rc, 0.0).unwrap();
        assert!(
            ((full - no_y) / full).abs() < 0.01,
            "commutator share {} of {full}",
            full - no_y
        );
    }
}
