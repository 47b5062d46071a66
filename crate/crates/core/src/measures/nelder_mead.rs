//! Plain Nelder–Mead simplex minimizer. Deterministic given the starting
//! point: no randomness, stable tie handling, fixed coefficient schedule.

pub struct Options {
    pub max_evals: usize,
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_evals: 4000,
            f_tol: 1e-12,
            x_tol: 1e-10,
        }
    }
}

pub struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

const ALPHA: f64 = 1.0; // reflection
const BETA: f64 = 2.0; // expansion
const GAMMA: f64 = 0.5; // contraction
const DELTA: f64 = 0.5; // shrink

pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], step: f64, opts: &Options) -> Outcome {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus one displaced vertex per coordinate.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }

    let mut converged = false;
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = (worst - best).abs();
        let size: f64 = (0..n)
            .map(|i| (simplex[n].0[i] - simplex[0].0[i]).abs())
            .fold(0.0, f64::max);
        if spread <= opts.f_tol * (1.0 + best.abs()) && size <= opts.x_tol * (1.0 + step.abs()) {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for v in simplex.iter().take(n) {
            for i in 0..n {
                centroid[i] += v.0[i] / n as f64;
            }
        }
        let combine = |t: f64| -> Vec<f64> {
            (0..n)
                .map(|i| centroid[i] + t * (simplex[n].0[i] - centroid[i]))
                .collect()
        };

        let reflected = combine(-ALPHA);
        let f_r = eval(&reflected, &mut evals);
        if f_r < simplex[0].1 {
            let expanded = combine(-BETA);
            let f_e = eval(&expanded, &mut evals);
            simplex[n] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
        } else if f_r < simplex[n - 1].1 {
            simplex[n] = (reflected, f_r);
        } else {
            let (contracted, f_c) = if f_r < simplex[n].1 {
                let x = combine(-GAMMA);
                let fx = eval(&x, &mut evals);
                (x, fx)
            } else {
                let x = combine(GAMMA);
                let fx = eval(&x, &mut evals);
                (x, fx)
            };
            if f_c < simplex[n].1.min(f_r) {
                simplex[n] = (contracted, f_c);
            } else {
                // Shrink toward the best vertex.
                let best_x = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for i in 0..n {
                        v.0[i] = best_x[i] + DELTA * (v.0[i] - best_x[i]);
                    }
                    v.1 = eval(&v.0.clone(), &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Outcome {
        x: simplex[0].0.clone(),
        f: simplex[0].1,
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| {
            (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
        };
        let out = minimize(
            rosen,
            &[-1.2, 1.0],
            0.5,
            &Options {
                max_evals: 20_000,
                ..Options::default()
            },
        );
        assert!(out.f < 1e-10, "f = {}", out.f);
        assert!((out.x[0] - 1.0).abs() < 1e-4 && (out.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn deterministic_given_start() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>() + (x[0] * x[1]).sin();
        let a = minimize(f, &[1.0, -2.0, 0.5], 0.3, &Options::default());
        let b = minimize(f, &[1.0, -2.0, 0.5], 0.3, &Options::default());
        assert_eq!(a.f, b.f);
        assert_eq!(a.x, b.x);
        assert_eq!(a.evals, b.evals);
    }
}
