//! Nelder-Mead simplex minimisation.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NelderMeadOptions {
    /// Largest distance (max-norm) from the best vertex at convergence.
    pub x_tol: f64,
    /// Largest value spread across the simplex at convergence.
    pub f_tol: f64,
    pub max_iter: usize,
    /// Relative perturbation of each coordinate for the initial simplex.
    pub rel_step: f64,
    /// Absolute perturbation used for zero coordinates.
    pub zero_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { x_tol: 1e-8, f_tol: 1e-8, max_iter: 400, rel_step: 0.05, zero_step: 0.00025 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub shrinks: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimises `f` from `x0`.
///
/// Converges when the value spread is within `f_tol` and either the simplex
/// fits within `x_tol` or all vertices share one value. The second case stops
/// the search on a flat stretch of a piecewise-constant objective instead of
/// shrinking until the iteration cap. Non-finite values count as `+inf`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], options: &NelderMeadOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    if dim == 0 {
        return Err(invalid("need at least one coordinate"));
    }
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let f0 = eval(x0);
    if !f0.is_finite() {
        return Err(invalid("objective is not finite at the starting point"));
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] = if x[i] != 0.0 { x[i] * (1.0 + options.rel_step) } else { options.zero_step };
        let v = eval(&x);
        simplex.push((x, v));
    }

    let mut iterations = 0;
    let mut shrinks = 0;
    let mut converged = false;
    loop {
        // stable sort keeps the earlier vertex first on ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let spread = simplex.iter().map(|v| (v.1 - best).abs()).fold(0.0, f64::max);
        let diameter = simplex[1..]
            .iter()
            .flat_map(|v| v.0.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= options.f_tol && (diameter <= options.x_tol || spread == 0.0) {
            converged = true;
            break;
        }
        if iterations >= options.max_iter {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|v| v.0[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = &simplex[dim];
        let towards = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = towards(REFLECT);
        let fr = eval(&xr);
        if fr < best {
            let xe = towards(REFLECT * EXPAND);
            let fe = eval(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let outside = fr < worst.1;
            let xc = if outside { towards(REFLECT * CONTRACT) } else { towards(-CONTRACT) };
            let fc = eval(&xc);
            if (outside && fc <= fr) || (!outside && fc < worst.1) {
                simplex[dim] = (xc, fc);
            } else {
                shrinks += 1;
                let anchor = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = anchor.iter().zip(&v.0).map(|(a, b)| a + SHRINK * (b - a)).collect();
                    let fx = eval(&x);
                    *v = (x, fx);
                }
            }
        }
    }
    let (x, value) = simplex.swap_remove(0);
    Ok(Minimum { x, value, iterations, evaluations, shrinks, converged })
}
