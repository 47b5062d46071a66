//! Gaussian quantum-correlation measures on the stationary state.
//!
//! Everything here works in the scaled convention σ = 2V/ħ with mode-ordered
//! components (x₁, p₁, x₂, p₂, ...), where the vacuum covariance is the
//! identity and physical states have symplectic eigenvalues ≥ 1. The
//! conversion from the chain's (x_L..x_R, p_L..p_R) covariance happens in
//! exactly one place, [`scaled_interleaved`], because mixed conventions are
//! the classic source of factor-of-two bugs in these measures.

mod criterion;
mod discord;
mod nelder_mead;
pub mod symplectic;

pub use criterion::{
    optimize_criterion, tau_kappa_n, CriterionSpec, MeasureResult, OptimizerBudget,
};
pub use discord::{discord_right_numeric, gaussian_discord_left, gaussian_discord_right};

use crate::model::Site;
use crate::steady::CovarianceMatrix;
use nalgebra::{DMatrix, Matrix2, Matrix4, Matrix6};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasuresError {
    #[error("state is not physical: {0}")]
    NonPhysical(String),
    #[error("Σ + V is singular, criterion undefined")]
    SingularSum,
    #[error("two-mode reduction needs two distinct sites")]
    SamePair,
    #[error("criterion specification invalid: {0}")]
    BadCriterionSpec(String),
    #[error("criterion file does not parse: {0}")]
    Parse(String),
    #[error("optimizer budget exhausted before convergence (best value {best})")]
    BudgetExhausted { best: f64 },
}

/// σ = 2V/ħ reordered to (x_L, p_L, x_C, p_C, x_R, p_R).
pub fn scaled_interleaved(v: &CovarianceMatrix) -> Matrix6<f64> {
    let mut out = Matrix6::zeros();
    for i in 0..3 {
        for si in 0..2 {
            for j in 0..3 {
                for sj in 0..2 {
                    out[(2 * i + si, 2 * j + sj)] = 2.0 * v.matrix()[(i + 3 * si, j + 3 * sj)];
                }
            }
        }
    }
    out
}

/// Two-mode reduced Gaussian state in the scaled convention, components
/// (x_i, p_i, x_j, p_j).
#[derive(Debug, Clone)]
pub struct TwoModeState {
    pub sigma: Matrix4<f64>,
}

impl TwoModeState {
    pub fn from_scaled(sigma: Matrix4<f64>) -> Self {
        TwoModeState { sigma }
    }

    fn block(&self, r: usize, c: usize) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(r, c).into_owned()
    }

    /// Local invariants (α, β, γ₂, δ) = (det A, det B, det C, det σ).
    pub fn invariants(&self) -> (f64, f64, f64, f64) {
        let a = self.block(0, 0).determinant();
        let b = self.block(2, 2).determinant();
        let c = self.block(0, 2).determinant();
        let d = self.sigma.determinant();
        (a, b, c, d)
    }

    /// Symplectic eigenvalues (ν₋, ν₊) from the invariants.
    pub fn symplectic_pair(&self) -> (f64, f64) {
        let (a, b, c, d) = self.invariants();
        let delta = a + b + 2.0 * c;
        let disc = (delta * delta - 4.0 * d).max(0.0).sqrt();
        let lo = 0.5 * (delta - disc);
        let hi = 0.5 * (delta + disc);
        (lo.max(0.0).sqrt(), hi.max(0.0).sqrt())
    }

    pub fn check_physical(&self) -> Result<(), MeasuresError> {
        // Pure states sit exactly on ν = 1 and the invariant route loses
        // ~√ε there; the tolerance must absorb that.
        let (lo, _) = self.symplectic_pair();
        if lo < 1.0 - 1e-6 {
            return Err(MeasuresError::NonPhysical(format!(
                "smallest symplectic eigenvalue {lo} < 1"
            )));
        }
        Ok(())
    }

    /// The same state with the two modes exchanged.
    pub fn swapped(&self) -> TwoModeState {
        let p = [2usize, 3, 0, 1];
        let mut out = Matrix4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                out[(r, c)] = self.sigma[(p[r], p[c])];
            }
        }
        TwoModeState { sigma: out }
    }
}

/// Extract the reduced two-mode state of sites (i, j) from the chain
/// covariance; scaled convention, ordering (x_i, p_i, x_j, p_j).
pub fn reduce_two_mode(
    v: &CovarianceMatrix,
    i: Site,
    j: Site,
) -> Result<TwoModeState, MeasuresError> {
    if i == j {
        return Err(MeasuresError::SamePair);
    }
    let full = scaled_interleaved(v);
    let modes = [i.index(), j.index()];
    let mut sigma = Matrix4::zeros();
    for (r, &mr) in modes.iter().enumerate() {
        for (c, &mc) in modes.iter().enumerate() {
            for sr in 0..2 {
                for sc in 0..2 {
                    sigma[(2 * r + sr, 2 * c + sc)] = full[(2 * mr + sr, 2 * mc + sc)];
                }
            }
        }
    }
    Ok(TwoModeState { sigma })
}

/// Reduced covariance of a subset of modes (scaled, interleaved input).
pub fn reduce_modes(sigma: &Matrix6<f64>, modes: &[usize]) -> DMatrix<f64> {
    let n = modes.len();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for (r, &mr) in modes.iter().enumerate() {
        for (c, &mc) in modes.iter().enumerate() {
            for sr in 0..2 {
                for sc in 0..2 {
                    out[(2 * r + sr, 2 * c + sc)] = sigma[(2 * mr + sr, 2 * mc + sc)];
                }
            }
        }
    }
    out
}

/// Symplectic eigenvalues of a 2n×2n scaled covariance (interleaved
/// ordering), ascending. Physical states give values ≥ 1.
///
/// Uses σ = LLᵀ and the antisymmetric M = LᵀJL, whose spectrum is ±iν_k;
/// the ν are the square roots of the (doubly degenerate) eigenvalues of
/// MᵀM, so only real symmetric solvers are needed.
pub fn symplectic_eigenvalues(sigma: &DMatrix<f64>) -> Result<Vec<f64>, MeasuresError> {
    let dim = sigma.nrows();
    if !dim.is_multiple_of(2) || sigma.ncols() != dim {
        return Err(MeasuresError::NonPhysical(format!(
            "covariance must be 2n×2n, got {}×{}",
            dim,
            sigma.ncols()
        )));
    }
    let n = dim / 2;
    let chol = sigma
        .clone()
        .cholesky()
        .ok_or_else(|| MeasuresError::NonPhysical("covariance not positive definite".into()))?;
    let l = chol.l();
    let mut j = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..n {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    let m = l.transpose() * j * l;
    let n_mat = m.transpose() * &m;
    let mut eig: Vec<f64> = n_mat.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    // Eigenvalues come in equal pairs {ν², ν²}; average each pair.
    let mut nu = Vec::with_capacity(n);
    for k in 0..n {
        let pair = 0.5 * (eig[2 * k] + eig[2 * k + 1]);
        nu.push(pair.max(0.0).sqrt());
    }
    Ok(nu)
}

/// h(x) = ((x+1)/2)·ln((x+1)/2) − ((x−1)/2)·ln((x−1)/2); the entropy carried
/// by one symplectic eigenvalue (scaled convention, h(1) = 0).
pub fn entropy_f(x: f64) -> f64 {
    if x <= 1.0 + 1e-12 {
        return 0.0;
    }
    let p = 0.5 * (x + 1.0);
    let m = 0.5 * (x - 1.0);
    p * p.ln() - m * m.ln()
}

/// Von Neumann entropy of a Gaussian state: Σ_k h(ν_k). Zero for pure states.
pub fn von_neumann_entropy(sigma: &DMatrix<f64>) -> Result<f64, MeasuresError> {
    Ok(symplectic_eigenvalues(sigma)?.iter().map(|&nu| entropy_f(nu)).sum())
}

/// Logarithmic negativity E_N = max{0, −ln ν̃₋} where ν̃₋ is the smallest
/// symplectic eigenvalue of the partially transposed state (Λ = diag(1,1,1,−1)
/// in the scaled convention).
pub fn log_negativity(st: &TwoModeState) -> Result<f64, MeasuresError> {
    st.check_physical()?;
    let (a, b, c, d) = st.invariants();
    // Partial transposition flips the sign of det C.
    let delta = a + b - 2.0 * c;
    let disc = (delta * delta - 4.0 * d).max(0.0).sqrt();
    let nu_minus_sq = 0.5 * (delta - disc);
    if nu_minus_sq <= 0.0 {
        return Err(MeasuresError::NonPhysical(format!(
            "partial transpose produced ν̃₋² = {nu_minus_sq}"
        )));
    }
    let nu_minus = nu_minus_sq.sqrt();
    Ok((-nu_minus.ln()).max(0.0))
}

/// Partial-transpose witness: the combination
/// C_xx C_pp − C_xp C_px of cross-mode covariance entries (original ħ/2
/// convention). A negative value is necessary for two-mode entanglement;
/// the flag reports `value < 0`.
pub fn simon_witness(st: &TwoModeState) -> (f64, bool) {
    // det C in the scaled convention is 4× the displayed combination.
    let c = st.block(0, 2).determinant() / 4.0;
    (c, c < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::symplectic::{
        local_symplectic, pure_probe, two_mode_squeezed_thermal, xxpp_to_interleaved,
    };
    use approx::assert_relative_eq;
    use nalgebra::Vector6;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vacuum_cov() -> CovarianceMatrix {
        CovarianceMatrix::from_matrix(Matrix6::identity() * 0.5)
    }

    fn product_thermal(n: [f64; 3]) -> CovarianceMatrix {
        let d = Vector6::new(
            n[0] + 0.5,
            n[1] + 0.5,
            n[2] + 0.5,
            n[0] + 0.5,
            n[1] + 0.5,
            n[2] + 0.5,
        );
        CovarianceMatrix::from_matrix(Matrix6::from_diagonal(&d))
    }

    #[test]
    fn vacuum_reduces_to_identity() {
        let st = reduce_two_mode(&vacuum_cov(), Site::Left, Site::Right).unwrap();
        assert_eq!(st.sigma, Matrix4::identity());
        assert!(matches!(
            reduce_two_mode(&vacuum_cov(), Site::Left, Site::Left),
            Err(MeasuresError::SamePair)
        ));
    }

    #[test]
    fn reduction_commutes_with_reflection() {
        let v = product_thermal([0.3, 1.0, 2.0]);
        let st = reduce_two_mode(&v, Site::Left, Site::Center).unwrap();
        let str_ = reduce_two_mode(&v.reflected(), Site::Right, Site::Center).unwrap();
        assert_eq!(st.sigma, str_.sigma);
    }

    #[test]
    fn symplectic_eigenvalues_reference_states() {
        // Vacuum.
        let nu = symplectic_eigenvalues(&DMatrix::identity(6, 6)).unwrap();
        assert!(nu.iter().all(|&x| (x - 1.0).abs() < 1e-12));

        // Thermal mode: ν = 2n̄ + 1.
        let n_bar = 0.7;
        let sigma = DMatrix::from_diagonal_element(2, 2, 2.0 * n_bar + 1.0);
        let nu = symplectic_eigenvalues(&sigma).unwrap();
        assert_relative_eq!(nu[0], 2.0 * n_bar + 1.0, max_relative = 1e-12);

        // Two-mode squeezed vacuum is pure: both eigenvalues 1.
        let tmsv = two_mode_squeezed_thermal(0.5, 1.0, 1.0);
        let nu = symplectic_eigenvalues(&DMatrix::from_fn(4, 4, |r, c| tmsv[(r, c)])).unwrap();
        assert!(nu.iter().all(|&x| (x - 1.0).abs() < 1e-10), "{nu:?}");

        // Direct sum: spectrum is the union of the parts.
        let mut ds = DMatrix::<f64>::zeros(4, 4);
        ds[(0, 0)] = 3.0;
        ds[(1, 1)] = 3.0;
        ds[(2, 2)] = 1.4;
        ds[(3, 3)] = 1.4;
        let nu = symplectic_eigenvalues(&ds).unwrap();
        assert_relative_eq!(nu[0], 1.4, max_relative = 1e-12);
        assert_relative_eq!(nu[1], 3.0, max_relative = 1e-12);

        assert!(symplectic_eigenvalues(&DMatrix::zeros(4, 4)).is_err());
    }

    #[test]
    fn log_negativity_reference_states() {
        // Product thermal state is separable.
        let st = reduce_two_mode(&product_thermal([0.5, 1.0, 2.0]), Site::Left, Site::Right)
            .unwrap();
        assert_eq!(log_negativity(&st).unwrap(), 0.0);

        // Two-mode squeezed vacuum: E_N = 2s.
        let s = 0.5;
        let st = TwoModeState::from_scaled(two_mode_squeezed_thermal(s, 1.0, 1.0));
        assert_relative_eq!(log_negativity(&st).unwrap(), 2.0 * s, epsilon = 1e-12);
    }

    #[test]
    fn log_negativity_invariant_under_local_symplectics() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base = two_mode_squeezed_thermal(0.6, 1.3, 1.05);
        let st = TwoModeState::from_scaled(base);
        let en = log_negativity(&st).unwrap();
        for _ in 0..20 {
            let s1 = local_symplectic(
                rng.random_range(-3.0..3.0),
                rng.random_range(-0.8..0.8),
                rng.random_range(-3.0..3.0),
            );
            let s2 = local_symplectic(
                rng.random_range(-3.0..3.0),
                rng.random_range(-0.8..0.8),
                rng.random_range(-3.0..3.0),
            );
            let mut s = Matrix4::zeros();
            s.view_mut((0, 0), (2, 2)).copy_from(&s1);
            s.view_mut((2, 2), (2, 2)).copy_from(&s2);
            let conj = TwoModeState::from_scaled(s * base * s.transpose());
            let en2 = log_negativity(&conj).unwrap();
            assert!((en - en2).abs() < 1e-9, "{en} vs {en2}");
        }
    }

    #[test]
    fn partial_transpose_route_matches_invariant_route() {
        // Λ σ Λ fed through the generic symplectic solver must agree with
        // the closed-form ν̃₋.
        let sigma = two_mode_squeezed_thermal(0.4, 1.5, 1.1);
        let lambda = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
        let pt = lambda * sigma * lambda;
        let nu = symplectic_eigenvalues(&DMatrix::from_fn(4, 4, |r, c| pt[(r, c)])).unwrap();
        let st = TwoModeState::from_scaled(sigma);
        let en_closed = log_negativity(&st).unwrap();
        let en_generic = (-nu[0].ln()).max(0.0);
        assert_relative_eq!(en_closed, en_generic, epsilon = 1e-10);
    }

    #[test]
    fn simon_witness_reference_states() {
        let st = reduce_two_mode(&product_thermal([0.5, 1.0, 2.0]), Site::Left, Site::Right)
            .unwrap();
        let (value, flag) = simon_witness(&st);
        assert!(value >= 0.0 && !flag);

        let s = 0.5f64;
        let st = TwoModeState::from_scaled(two_mode_squeezed_thermal(s, 1.0, 1.0));
        let (value, flag) = simon_witness(&st);
        assert!(flag);
        // C = sinh(2s)·diag(1,−1) in the scaled convention, so the displayed
        // combination is −sinh²(2s)/4.
        assert_relative_eq!(value, -(2.0 * s).sinh().powi(2) / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_reference_states() {
        assert_eq!(von_neumann_entropy(&DMatrix::identity(2, 2)).unwrap(), 0.0);
        // Thermal n̄ = 1: S = h(3) = 2 ln 2.
        let sigma = DMatrix::from_diagonal_element(2, 2, 3.0);
        assert_relative_eq!(
            von_neumann_entropy(&sigma).unwrap(),
            2.0 * std::f64::consts::LN_2,
            max_relative = 1e-12
        );
        // Two-mode squeezed vacuum: global entropy 0, each mode h(cosh 2s).
        let s = 0.8f64;
        let tmsv = two_mode_squeezed_thermal(s, 1.0, 1.0);
        let g = DMatrix::from_fn(4, 4, |r, c| tmsv[(r, c)]);
        assert!(von_neumann_entropy(&g).unwrap().abs() < 1e-9);
        let mode = DMatrix::from_fn(2, 2, |r, c| tmsv[(r, c)]);
        assert_relative_eq!(
            von_neumann_entropy(&mode).unwrap(),
            entropy_f((2.0 * s).cosh()),
            max_relative = 1e-10
        );
    }

    #[test]
    fn pure_three_mode_schmidt_symmetry() {
        // For any pure three-mode state the entropy of one mode equals the
        // entropy of the complementary pair.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let mut params = [0.0; 12];
            for p in params.iter_mut() {
                *p = rng.random_range(-0.8..0.8);
            }
            let sigma = pure_probe(&params);
            for k in 0..3 {
                let rest: Vec<usize> = (0..3).filter(|&m| m != k).collect();
                let s1 = von_neumann_entropy(&reduce_modes(&sigma, &[k])).unwrap();
                let s2 = von_neumann_entropy(&reduce_modes(&sigma, &rest)).unwrap();
                assert!((s1 - s2).abs() < 1e-9, "mode {k}: {s1} vs {s2}");
            }
        }
    }

    #[test]
    fn interleaving_round_trip() {
        let v = product_thermal([0.1, 0.2, 0.3]);
        let sigma = scaled_interleaved(&v);
        for i in 0..3 {
            assert_relative_eq!(
                sigma[(2 * i, 2 * i)],
                2.0 * v.matrix()[(i, i)],
                epsilon = 1e-15
            );
            assert_relative_eq!(
                sigma[(2 * i + 1, 2 * i + 1)],
                2.0 * v.matrix()[(3 + i, 3 + i)],
                epsilon = 1e-15
            );
        }
        // xxpp helper is the inverse permutation of the conversion.
        let m = xxpp_to_interleaved(&(2.0 * v.matrix()));
        assert_eq!(m, sigma);
    }
}
