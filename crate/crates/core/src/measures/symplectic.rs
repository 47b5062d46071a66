//! Symplectic building blocks: matrix exponential, orthogonal-symplectic
//! rotations, squeezers, and reference covariance constructions used across
//! the measures and their tests.

use nalgebra::{Matrix2, Matrix4, Matrix6};

/// Matrix exponential by scaling-and-squaring with a Taylor kernel; adequate
/// for the well-conditioned 6×6 generators used here.
pub fn expm(m: &Matrix6<f64>) -> Matrix6<f64> {
    let norm = m.iter().map(|x| x.abs()).fold(0.0, f64::max) * 6.0;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings as i32);
    let mut term = Matrix6::identity();
    let mut sum = Matrix6::identity();
    for k in 1..=16 {
        term = term * scaled / k as f64;
        sum += term;
    }
    let mut out = sum;
    for _ in 0..squarings {
        out = out * out;
    }
    out
}

/// Permute a 6×6 matrix from (x_1..x_3, p_1..p_3) ordering to the
/// mode-interleaved (x_1, p_1, x_2, p_2, x_3, p_3) ordering.
pub fn xxpp_to_interleaved(m: &Matrix6<f64>) -> Matrix6<f64> {
    let perm = |k: usize| -> usize {
        let mode = k / 2;
        let quad = k % 2;
        mode + 3 * quad
    };
    Matrix6::from_fn(|r, c| m[(perm(r), perm(c))])
}

/// Covariance of a pure three-mode Gaussian state, interleaved ordering.
///
/// Parameters: 3 antisymmetric + 6 symmetric entries generate an
/// orthogonal-symplectic O = exp([[a, b], [−b, a]]), and 3 squeezing
/// exponents d give σ = O·diag(e^{2d}, e^{−2d})·Oᵀ = S Sᵀ with S symplectic.
/// This covers the full pure-state manifold (12 parameters for n = 3).
pub fn pure_probe(params: &[f64; 12]) -> Matrix6<f64> {
    let (a01, a02, a12) = (params[0], params[1], params[2]);
    let b = &params[3..9];
    let mut gen = Matrix6::<f64>::zeros();
    // a block: antisymmetric.
    let a = [[0.0, a01, a02], [-a01, 0.0, a12], [-a02, -a12, 0.0]];
    // b block: symmetric, packed upper triangle (00, 01, 02, 11, 12, 22).
    let bm = [
        [b[0], b[1], b[2]],
        [b[1], b[3], b[4]],
        [b[2], b[4], b[5]],
    ];
    for i in 0..3 {
        for j in 0..3 {
            gen[(i, j)] = a[i][j];
            gen[(i, 3 + j)] = bm[i][j];
            gen[(3 + i, j)] = -bm[i][j];
            gen[(3 + i, 3 + j)] = a[i][j];
        }
    }
    let o = expm(&gen);
    let mut d2 = Matrix6::<f64>::zeros();
    for i in 0..3 {
        d2[(i, i)] = (2.0 * params[9 + i]).exp();
        d2[(3 + i, 3 + i)] = (-2.0 * params[9 + i]).exp();
    }
    let sigma_xxpp = o * d2 * o.transpose();
    xxpp_to_interleaved(&sigma_xxpp)
}

/// Covariance of a product of single-mode pure Gaussian states, interleaved
/// ordering: per mode Σᵢ = R(θᵢ)·diag(e^{2dᵢ}, e^{−2dᵢ})·R(θᵢ)ᵀ.
/// Params: (θ₁, θ₂, θ₃, d₁, d₂, d₃).
pub fn product_probe(params: &[f64; 6]) -> Matrix6<f64> {
    let mut out = Matrix6::<f64>::zeros();
    for mode in 0..3 {
        let theta = params[mode];
        let d = params[3 + mode];
        let r = Matrix2::new(theta.cos(), -theta.sin(), theta.sin(), theta.cos());
        let sq = Matrix2::new((2.0 * d).exp(), 0.0, 0.0, (-2.0 * d).exp());
        let block = r * sq * r.transpose();
        for a in 0..2 {
            for b in 0..2 {
                out[(2 * mode + a, 2 * mode + b)] = block[(a, b)];
            }
        }
    }
    out
}

/// Single-mode symplectic: rotation(φ₂)·squeeze(u)·rotation(φ₁).
pub fn local_symplectic(phi1: f64, u: f64, phi2: f64) -> Matrix2<f64> {
    let rot = |t: f64| Matrix2::new(t.cos(), -t.sin(), t.sin(), t.cos());
    let squeeze = Matrix2::new(u.exp(), 0.0, 0.0, (-u).exp());
    rot(phi2) * squeeze * rot(phi1)
}

/// Two-mode squeezed thermal covariance (scaled, interleaved):
/// S(s)·diag(v₁, v₁, v₂, v₂)·S(s)ᵀ. With v = 1 this is the two-mode
/// squeezed vacuum, A = cosh(2s)·1, C = sinh(2s)·diag(1, −1).
pub fn two_mode_squeezed_thermal(s: f64, v1: f64, v2: f64) -> Matrix4<f64> {
    let (c, sh) = (s.cosh(), s.sinh());
    let sq = Matrix4::new(
        c, 0.0, sh, 0.0, //
        0.0, c, 0.0, -sh, //
        sh, 0.0, c, 0.0, //
        0.0, -sh, 0.0, c,
    );
    let thermal = Matrix4::from_diagonal(&nalgebra::Vector4::new(v1, v1, v2, v2));
    sq * thermal * sq.transpose()
}
