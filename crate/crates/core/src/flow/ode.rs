//! Adaptive Dormand-Prince 5(4) integrator on flat real state vectors.
//!
//! The stepper lands exactly on every requested output point instead of
//! interpolating, so samples carry the full local accuracy of the method.

use crate::error::{Error, Result};

// Dormand-Prince tableau. The flows here are autonomous, so the nodes c_i
// are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub initial_step: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct OdeSample {
    pub t: f64,
    pub y: Vec<f64>,
    /// Last accepted step before reaching `t` (0 at the initial point).
    pub step: f64,
}

/// Integrates `dy/dt = rhs(y)` from `grid[0]` through every point of `grid`.
///
/// `grid` must be strictly increasing. `project` runs on every accepted state
/// and may nudge it back onto an invariant manifold.
pub(crate) fn integrate<F, P>(
    y0: Vec<f64>,
    grid: &[f64],
    opts: OdeOptions,
    mut rhs: F,
    mut project: P,
) -> Result<Vec<OdeSample>>
where
    F: FnMut(&[f64], &mut [f64]),
    P: FnMut(&mut [f64]),
{
    let dim = y0.len();
    let Some((&t0, rest)) = grid.split_first() else {
        return Ok(Vec::new());
    };
    let t_end = *grid.last().unwrap_or(&t0);

    let mut samples = Vec::with_capacity(grid.len());
    let mut y = y0;
    project(&mut y);
    samples.push(OdeSample { t: t0, y: y.clone(), step: 0.0 });

    let mut k = vec![vec![0.0; dim]; 7];
    let mut tmp = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut t = t0;
    let mut h = opts.initial_step.abs().max(f64::MIN_POSITIVE);
    let mut steps = 0usize;
    let mut last_step = 0.0;

    rhs(&y, &mut k[0]);

    for &target in rest {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::StepLimitExceeded { max_steps: opts.max_steps, l: t, l_max: t_end });
            }
            let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
            let remaining = target - t;
            let hitting = h >= remaining;
            let h_try = if hitting { remaining } else { h };
            if h_try < h_min && !hitting {
                return Err(Error::ToleranceFailure { l: t, step: h_try });
            }

            stage(&y, &[(A21, 0)], h_try, &k, &mut tmp);
            rhs(&tmp, &mut k[1]);
            stage(&y, &[(A31, 0), (A32, 1)], h_try, &k, &mut tmp);
            rhs(&tmp, &mut k[2]);
            stage(&y, &[(A41, 0), (A42, 1), (A43, 2)], h_try, &k, &mut tmp);
            rhs(&tmp, &mut k[3]);
            stage(&y, &[(A51, 0), (A52, 1), (A53, 2), (A54, 3)], h_try, &k, &mut tmp);
            rhs(&tmp, &mut k[4]);
            stage(&y, &[(A61, 0), (A62, 1), (A63, 2), (A64, 3), (A65, 4)], h_try, &k, &mut tmp);
            rhs(&tmp, &mut k[5]);
            stage(&y, &[(A71, 0), (A73, 2), (A74, 3), (A75, 4), (A76, 5)], h_try, &k, &mut y_new);
            rhs(&y_new, &mut k[6]);

            let mut acc = 0.0;
            for i in 0..dim {
                let e =
                    h_try * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
                acc += (e / scale).powi(2);
            }
            let err = (acc / dim.max(1) as f64).sqrt();
            if !err.is_finite() {
                if h_try <= h_min {
                    return Err(Error::ToleranceFailure { l: t, step: h_try });
                }
                h = h_try * MIN_FACTOR;
                steps += 1;
                continue;
            }

            let factor = if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR) };
            steps += 1;

            if err <= 1.0 {
                t = if hitting { target } else { t + h_try };
                project(&mut y_new);
                std::mem::swap(&mut y, &mut y_new);
                rhs(&y, &mut k[0]);
                last_step = h_try;
                // A step shortened to hit an output point says nothing about
                // the natural step size, so only grow from full steps.
                if !hitting || factor < 1.0 {
                    h = h_try * factor;
                }
            } else {
                if h_try <= h_min {
                    return Err(Error::ToleranceFailure { l: t, step: h_try });
                }
                h = h_try * factor.min(1.0);
            }
        }
        samples.push(OdeSample { t, y: y.clone(), step: last_step });
    }
    Ok(samples)
}

fn stage(y: &[f64], coeffs: &[(f64, usize)], h: f64, k: &[Vec<f64>], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for &(a, j) in coeffs {
            s += a * k[j][i];
        }
        *o = y[i] + h * s;
    }
}
