//! Wegner's double-bracket flow `dH/dl = [[H_d, H], H]` for dense Hermitian
//! matrices.
//!
//! Unitary convention: the accumulated unitary solves `dU/dl = η U` with
//! `U(0) = I`, so `H(l) = U(l) H(0) U†(l)`. States transform the opposite way,
//! `|ψ(l)⟩ = U†(l) |ψ⟩`.

mod hermitian;
pub(crate) mod ode;

pub use hermitian::{hermiticity_defect, HermitianMatrix};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use ode::OdeOptions;

/// Drift in `‖U U† − I‖_F` above which the accumulated unitary is projected
/// back onto the unitary group.
pub const UNITARITY_DRIFT_LIMIT: f64 = 1e-10;

/// `H_d`: diagonal entries of `h`, zeros elsewhere.
pub fn diagonal_part(h: &HermitianMatrix) -> HermitianMatrix {
    let d = h.diagonal();
    HermitianMatrix::from_diagonal(&d).expect("dim >= 1")
}

/// Frobenius norm of the off-diagonal part.
pub fn offdiag_norm(h: &HermitianMatrix) -> f64 {
    let m = h.as_matrix();
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Wegner generator `η = [H_d, H]`, anti-Hermitian.
///
/// Entrywise `η_ij = (h_ii − h_jj) h_ij`, which is the commutator with the
/// diagonal part written out.
pub fn wegner_generator(h: &HermitianMatrix) -> CMatrix {
    let d = h.diagonal();
    let m = h.as_matrix();
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (d[i] - d[j]))
}

/// Right-hand side of the flow, `[η(H), H]`.
pub fn flow_rhs(h: &HermitianMatrix) -> HermitianMatrix {
    let eta = wegner_generator(h);
    HermitianMatrix::hermitize(linalg::commutator(&eta, h.as_matrix()))
}

/// Coupled index pairs `(i, j)`, `i < j`, whose diagonal gap is at most
/// `gap_tol` while `|h_ij|` exceeds `coupling_tol`. The Wegner generator
/// vanishes on such pairs, so the flow cannot remove their coupling.
pub fn stalled_pairs(h: &HermitianMatrix, gap_tol: f64, coupling_tol: f64) -> Vec<(usize, usize)> {
    let d = h.diagonal();
    let mut out = Vec::new();
    for i in 0..h.dim() {
        for j in i + 1..h.dim() {
            if (d[i] - d[j]).abs() <= gap_tol && h[(i, j)].norm() > coupling_tol {
                out.push((i, j));
            }
        }
    }
    out
}

/// Settings for [`integrate_flow`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub l_max: f64,
    pub max_steps: usize,
    /// Output points in `[0, l_max]`, strictly increasing. `l = 0` is always
    /// emitted even when absent here.
    pub sample_grid: Vec<f64>,
    /// Project the accumulated unitary back onto the unitary group whenever
    /// its drift exceeds [`UNITARITY_DRIFT_LIMIT`].
    pub reorthonormalize: bool,
}

impl IntegratorConfig {
    /// Log-spaced sampling from `l_min` to `l_max` (plus `l = 0`) with tight
    /// default tolerances.
    pub fn log_spaced(l_min: f64, l_max: f64, count: usize) -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            l_max,
            max_steps: 1_000_000,
            sample_grid: log_grid(l_min, l_max, count),
            reorthonormalize: true,
        }
    }

    pub fn with_grid(grid: Vec<f64>) -> Self {
        let l_max = grid.last().copied().unwrap_or(0.0);
        Self { rel_tol: 1e-12, abs_tol: 1e-14, l_max, max_steps: 1_000_000, sample_grid: grid, reorthonormalize: true }
    }

    pub fn tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| x > 0.0 && x < 1.0;
        if !in_unit(self.rel_tol) || !in_unit(self.abs_tol) {
            return Err(Error::InvalidConfig(format!(
                "tolerances must lie in (0, 1): rel_tol = {}, abs_tol = {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if !(self.l_max > 0.0) || !self.l_max.is_finite() {
            return Err(Error::InvalidConfig(format!("l_max must be positive, got {}", self.l_max)));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        for w in self.sample_grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidConfig("sample grid must be strictly increasing".into()));
            }
        }
        if let (Some(&first), Some(&last)) = (self.sample_grid.first(), self.sample_grid.last()) {
            if first < 0.0 || !last.is_finite() || last > self.l_max {
                return Err(Error::InvalidConfig(format!("sample grid must lie in [0, l_max = {}]", self.l_max)));
            }
        }
        Ok(())
    }

    /// Grid actually integrated over: always starts at 0 and ends at `l_max`.
    fn effective_grid(&self) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.sample_grid.len() + 2);
        g.push(0.0);
        g.extend(self.sample_grid.iter().copied().filter(|&l| l > 0.0));
        if g.last().copied() != Some(self.l_max) {
            g.push(self.l_max);
        }
        g
    }
}

/// `0` followed by `count` log-spaced points from `l_min` to `l_max`.
pub fn log_grid(l_min: f64, l_max: f64, count: usize) -> Vec<f64> {
    let mut g = vec![0.0];
    match count {
        0 => {}
        1 => g.push(l_max),
        _ => {
            let (a, b) = (l_min.ln(), l_max.ln());
            let last = count - 1;
            g.extend((0..count).map(|i| if i == last { l_max } else { (a + (b - a) * i as f64 / last as f64).exp() }));
        }
    }
    g
}

/// `count` evenly spaced points from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let last = count - 1;
            (0..count).map(|i| if i == last { max } else { min + (max - min) * i as f64 / last as f64 }).collect()
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowSample {
    pub l: f64,
    pub h: HermitianMatrix,
    pub offdiag_norm: f64,
    /// Last accepted integrator step before this sample (0 at `l = 0`).
    pub step_size: f64,
    pub unitary: Option<CMatrix>,
}

#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub samples: Vec<FlowSample>,
}

/// Convergence summary of the last sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDiagnostics {
    pub l: f64,
    pub offdiag_norm: f64,
    pub stalled_pairs: Vec<(usize, usize)>,
}

impl FlowTrajectory {
    pub fn first(&self) -> &FlowSample {
        &self.samples[0]
    }

    pub fn last(&self) -> &FlowSample {
        self.samples.last().expect("trajectory has at least the l = 0 sample")
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Reports the final off-diagonal norm and any degenerate coupled pairs.
    /// Thresholds are relative to the largest diagonal magnitude.
    pub fn diagnostics(&self) -> FlowDiagnostics {
        let last = self.last();
        let scale = last.h.diagonal().iter().fold(1.0_f64, |m, d| m.max(d.abs()));
        FlowDiagnostics {
            l: last.l,
            offdiag_norm: last.offdiag_norm,
            stalled_pairs: stalled_pairs(&last.h, 1e-8 * scale, 1e-8 * scale),
        }
    }
}

/// Integrates the Wegner flow of `h0` over `cfg.sample_grid` with an adaptive
/// Dormand-Prince 5(4) method. With `accumulate_unitary`, `dU/dl = η U` is
/// integrated alongside and every sample carries `U(l)`.
pub fn integrate_flow(
    h0: &HermitianMatrix,
    cfg: &IntegratorConfig,
    accumulate_unitary: bool,
) -> Result<FlowTrajectory> {
    cfg.validate()?;
    let n = h0.dim();
    let nn = n * n;
    let grid = cfg.effective_grid();

    let mut y0 = Vec::with_capacity(if accumulate_unitary { 4 * nn } else { 2 * nn });
    flatten_into(h0.as_matrix(), &mut y0);
    if accumulate_unitary {
        flatten_into(&CMatrix::identity(n, n), &mut y0);
    }

    let opts = OdeOptions {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        max_steps: cfg.max_steps,
        initial_step: initial_step(h0, cfg.l_max),
    };

    let rhs = |y: &[f64], dy: &mut [f64]| {
        let h = HermitianMatrix::hermitize(unflatten(&y[..2 * nn], n));
        let eta = wegner_generator(&h);
        let dh = linalg::commutator(&eta, h.as_matrix());
        write_flat(&dh, &mut dy[..2 * nn]);
        if accumulate_unitary {
            let u = unflatten(&y[2 * nn..], n);
            write_flat(&(eta * u), &mut dy[2 * nn..]);
        }
    };
    let reortho = cfg.reorthonormalize;
    let project = |y: &mut [f64]| {
        let h = HermitianMatrix::hermitize(unflatten(&y[..2 * nn], n));
        write_flat(h.as_matrix(), &mut y[..2 * nn]);
        if accumulate_unitary && reortho {
            let u = unflatten(&y[2 * nn..], n);
            if linalg::unitarity_defect(&u) > UNITARITY_DRIFT_LIMIT {
                write_flat(&linalg::polar_unitary(&u), &mut y[2 * nn..]);
            }
        }
    };

    let raw = ode::integrate(y0, &grid, opts, rhs, project)?;
    let samples = raw
        .into_iter()
        .map(|s| {
            let h = HermitianMatrix::hermitize(unflatten(&s.y[..2 * nn], n));
            let unitary = accumulate_unitary.then(|| unflatten(&s.y[2 * nn..], n));
            FlowSample { l: s.t, offdiag_norm: offdiag_norm(&h), h, step_size: s.step, unitary }
        })
        .collect();
    Ok(FlowTrajectory { samples })
}

/// Initial step from the widest diagonal gap and the coupling strength: the
/// off-diagonal entries decay at a rate set by the squared gap.
fn initial_step(h: &HermitianMatrix, l_max: f64) -> f64 {
    let d = h.diagonal();
    let (lo, hi) = d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let m = h.as_matrix();
    let coupling = (0..h.dim())
        .flat_map(|i| (0..h.dim()).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].norm())
        .fold(0.0, f64::max);
    let scale = (hi - lo) + 2.0 * coupling;
    if scale > 0.0 {
        (1e-2 / (scale * scale)).min(l_max)
    } else {
        l_max
    }
}

fn flatten_into(m: &CMatrix, out: &mut Vec<f64>) {
    for z in m.iter() {
        out.push(z.re);
        out.push(z.im);
    }
}

fn write_flat(m: &CMatrix, out: &mut [f64]) {
    for (k, z) in m.iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
}

fn unflatten(y: &[f64], n: usize) -> CMatrix {
    CMatrix::from_iterator(n, n, y.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])))
}

#[cfg(test)]
mod tests;
