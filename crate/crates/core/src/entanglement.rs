//! Von Neumann entanglement entropy of the flow-transformed product state
//! `U†(l)|e,n⟩`, along the flow and under subsequent time evolution.
//!
//! All entropies are in nats.

use crate::error::{Error, Result};
use crate::jc::{self, FockTruncation, JCParams};
use crate::state::{partial_trace, DensityMatrix, Subsystem};

/// Eigenvalues below this are rejected rather than clipped.
pub const NEGATIVE_EIGEN_LIMIT: f64 = 1e-8;

/// `−Σ p ln p` over the eigenvalues of `rho`, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let raw = crate::linalg::hermitian_eigenvalues(rho.as_matrix());
    if let Some(&min) = raw.first() {
        if min < -NEGATIVE_EIGEN_LIMIT {
            return Err(Error::Domain(format!("eigenvalue {min:e} is negative")));
        }
    }
    Ok(raw.into_iter().map(|p| xlnx(p.max(0.0))).sum::<f64>().max(0.0))
}

/// `−p ln p`, zero at `p = 0`.
fn xlnx(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Entropy of a two-outcome distribution `(p, 1 − p)`.
pub fn binary_entropy(p: f64) -> f64 {
    xlnx(p) + xlnx(1.0 - p)
}

pub fn nats_to_bits(s: f64) -> f64 {
    s / std::f64::consts::LN_2
}

/// Atom populations `s_± = (1 ± L̃_n(l))/2` of the transformed state.
pub fn s_pm(p: &JCParams, n: usize, l: f64) -> Result<(f64, f64)> {
    let u = jc::unitary_coeffs(p, n, l)?;
    Ok((u.alpha * u.alpha, u.gamma * u.gamma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyFlowSample {
    pub l: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub entropy: f64,
}

fn check_grid(grid: &[f64], what: &str, nonnegative: bool) -> Result<()> {
    if grid.iter().any(|x| !x.is_finite()) || (nonnegative && grid.iter().any(|&x| x < 0.0)) {
        return Err(Error::Domain(format!("{what} grid has invalid entries")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(format!("{what} grid must be strictly increasing")));
    }
    Ok(())
}

/// `S_atom(l) = −s₊ ln s₊ − s₋ ln s₋` along `l_grid`.
pub fn entropy_flow(p: &JCParams, n: usize, l_grid: &[f64]) -> Result<Vec<EntropyFlowSample>> {
    check_grid(l_grid, "flow", true)?;
    l_grid
        .iter()
        .map(|&l| {
            let (s_plus, s_minus) = s_pm(p, n, l)?;
            Ok(EntropyFlowSample { l, s_plus, s_minus, entropy: xlnx(s_plus) + xlnx(s_minus) })
        })
        .collect()
}

/// `l → ∞` limit of [`entropy_flow`]: binary entropy of `(1 + Δ/Ω_n)/2`.
pub fn asymptotic_entropy(p: &JCParams, n: usize) -> f64 {
    let k = p.delta() / jc::rabi_frequency(p, n);
    xlnx(0.5 * (1.0 + k)) + xlnx(0.5 * (1.0 - k))
}

/// Populations after evolving the transformed state for time `t` under the
/// bare Hamiltonian:
///
/// `s_± = ½{1 ± L̃ cos Ωt ± (1 − cos Ωt)(Δ/Ω)[(Δ/Ω) L̃ + √((1 − L̃²)(1 − Δ²/Ω²))]}`
pub fn s_pm_t(p: &JCParams, n: usize, l: f64, t: f64) -> Result<(f64, f64)> {
    let u = jc::unitary_coeffs(p, n, l)?;
    let lt = jc::tilde_l(p, n, l)?;
    let omega_n = jc::rabi_frequency(p, n);
    let ratio = p.delta() / omega_n;
    // 1 − L̃² = 4α²γ²; 1 − Δ²/Ω² = 4λ²(n+1)/Ω²
    let one_minus_lt2 = 4.0 * u.alpha * u.alpha * u.gamma * u.gamma;
    let one_minus_k2 = 4.0 * p.lambda() * p.lambda() * (n as f64 + 1.0) / (omega_n * omega_n);
    let bracket = ratio * lt + (one_minus_lt2 * one_minus_k2).sqrt();
    let phase = omega_n * t;
    let cos = phase.cos();
    let one_minus_cos = 2.0 * (0.5 * phase).sin().powi(2);
    let shift = lt * cos + one_minus_cos * ratio * bracket;
    Ok((0.5 * (1.0 + shift), 0.5 * (1.0 - shift)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyTimeSample {
    pub l: f64,
    pub t: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub entropy: f64,
}

/// `S_atom(l, t)` over `t_grid`.
pub fn entropy_time_evolution(p: &JCParams, n: usize, l: f64, t_grid: &[f64]) -> Result<Vec<EntropyTimeSample>> {
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("time grid has non-finite entries".into()));
    }
    t_grid
        .iter()
        .map(|&t| {
            let (s_plus, s_minus) = s_pm_t(p, n, l, t)?;
            Ok(EntropyTimeSample { l, t, s_plus, s_minus, entropy: xlnx(s_plus) + xlnx(s_minus) })
        })
        .collect()
}

/// Peak-to-peak entropy over the samples.
pub fn oscillation_amplitude(samples: &[EntropyTimeSample]) -> f64 {
    let (lo, hi) =
        samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.entropy), hi.max(s.entropy)));
    if samples.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Peak-to-peak amplitude of `S(l, ·)` sampled at `points` times over one
/// Rabi period `2π/Ω_n`.
pub fn period_amplitude(p: &JCParams, n: usize, l: f64, points: usize) -> Result<f64> {
    let period = std::f64::consts::TAU / jc::rabi_frequency(p, n);
    let grid = crate::flow::linear_grid(0.0, period, points.max(2));
    Ok(oscillation_amplitude(&entropy_time_evolution(p, n, l, &grid)?))
}

/// Subsystem and total entropies of a state on the product space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArakiLieb {
    pub s_photon: f64,
    pub s_atom: f64,
    pub s_total: f64,
}

impl ArakiLieb {
    /// `|S_ph − S_at| ≤ S_tot ≤ S_ph + S_at`, each side with slack `tol`.
    pub fn chain_holds(&self, tol: f64) -> bool {
        (self.s_photon - self.s_atom).abs() <= self.s_total + tol && self.s_total <= self.s_photon + self.s_atom + tol
    }

    /// For a pure total state: `S_tot = 0` and `S_ph = S_at`.
    pub fn pure_equality_holds(&self, tol: f64) -> bool {
        self.s_total <= tol && (self.s_photon - self.s_atom).abs() <= tol
    }
}

pub fn araki_lieb_check(rho_total: &DensityMatrix, t: &FockTruncation) -> Result<ArakiLieb> {
    let photon = partial_trace(rho_total, Subsystem::Photon, t)?;
    let atom = partial_trace(rho_total, Subsystem::Atom, t)?;
    Ok(ArakiLieb {
        s_photon: von_neumann_entropy(&photon)?,
        s_atom: von_neumann_entropy(&atom)?,
        s_total: von_neumann_entropy(rho_total)?,
    })
}
