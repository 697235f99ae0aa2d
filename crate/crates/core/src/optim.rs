//! Derivative-free Nelder–Mead simplex minimization.
//!
//! Uses the dimension-adaptive coefficients of Gao and Han, which behave
//! better than the classic `(1, 2, ½, ½)` set once the parameter count grows
//! past a handful.

use alloc::vec::Vec;

/// Settings for one simplex run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Maximum objective evaluations.
    pub max_evals: usize,
    /// Stop once `f_worst − f_best ≤ tol`.
    pub tol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            tol: 1e-9,
            initial_step: 0.5,
        }
    }
}

/// Outcome of [`nelder_mead`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    /// Best point found.
    pub x: Vec<f64>,
    /// Objective at `x`.
    pub f: f64,
    /// Evaluations used.
    pub evals: usize,
    /// Whether the spread criterion was met before the budget ran out.
    pub converged: bool,
}

/// Minimizes `f` starting from `x0`.
pub fn nelder_mead(f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], opts: SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let nf = n.max(1) as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

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

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }

    let mut converged = false;
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[n].1 - simplex[0].1 <= opts.tol {
            converged = true;
            break;
        }

        let mut centroid = alloc::vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / nf;
            }
        }
        let along = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let worst = simplex[n].0.clone();
        let xr = along(alpha, &worst);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(alpha * beta, &worst);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - usize::from(n > 0)].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(alpha * gamma, &worst);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-gamma, &worst);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for item in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best
                .iter()
                .zip(&item.0)
                .map(|(b, xi)| b + delta * (xi - b))
                .collect();
            let fx = eval(&x, &mut evals);
            *item = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    SimplexResult {
        x,
        f,
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let mut f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2);
        let r = nelder_mead(&mut f, &[0.0, 0.0], SimplexOptions { tol: 1e-14, ..Default::default() });
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] + 2.0).abs() < 1e-5);
    }

    #[test]
    fn rosenbrock() {
        let mut f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = nelder_mead(
            &mut f,
            &[-1.2, 1.0],
            SimplexOptions {
                max_evals: 5000,
                tol: 1e-14,
                initial_step: 0.5,
            },
        );
        assert!(r.f < 1e-8, "{r:?}");
    }

    #[test]
    fn respects_budget() {
        let mut f = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>();
        let r = nelder_mead(
            &mut f,
            &[5.0; 8],
            SimplexOptions {
                max_evals: 50,
                tol: 0.0,
                initial_step: 1.0,
            },
        );
        assert!(!r.converged);
        assert!(r.evals <= 50 + 8 + 2);
    }
}
