//! First-order approximation of the flow unitary for weak coupling, and the
//! Ramsey-zone operators that generate the atom ladder operators.
//!
//! Atom 2×2 matrices use the product-basis ordering `(|g⟩, |e⟩)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jc::{self, basis_index, Atom, FockTruncation, JCParams};
use crate::linalg::{self, CMatrix};
use crate::state::{product_state, PureState};

/// Above this `λ/Δ` the first-order expansion is outside its regime.
pub const EXPANSION_WARN_RATIO: f64 = 0.05;

pub const PHASE_TOLERANCE: f64 = 1e-12;

pub fn in_expansion_regime(p: &JCParams) -> bool {
    p.coupling_ratio() <= EXPANSION_WARN_RATIO
}

/// `U(l) ≈ I + (1 − e^{−Δ² l}) (λ/Δ) (σ₊ a − σ₋ a†)` on the truncated space.
/// Unitary only to first order in `λ/Δ`.
pub fn approx_unitary(p: &JCParams, t: &FockTruncation, l: f64) -> Result<CMatrix> {
    if !(l >= 0.0) {
        return Err(Error::Domain(format!("flow parameter must be >= 0, got {l}")));
    }
    let eps = -(-p.delta() * p.delta() * l).exp_m1() * p.coupling_ratio();
    let dim = t.dim();
    let mut u = CMatrix::identity(dim, dim);
    for n in 0..t.n_max() {
        let amp = eps * (n as f64 + 1.0).sqrt();
        let (e, g) = (basis_index(Atom::Excited, n), basis_index(Atom::Ground, n + 1));
        // σ₊a: |g,n+1⟩ → √(n+1)|e,n⟩; σ₋a†: |e,n⟩ → √(n+1)|g,n+1⟩
        u[(e, g)] = linalg::re(amp);
        u[(g, e)] = linalg::re(-amp);
    }
    Ok(u)
}

/// `‖U_approx U_approx† − I‖_F`.
pub fn non_unitarity(p: &JCParams, t: &FockTruncation, l: f64) -> Result<f64> {
    Ok(linalg::unitarity_defect(&approx_unitary(p, t, l)?))
}

/// `‖U_approx − U_exact‖_F`.
pub fn operator_error(p: &JCParams, t: &FockTruncation, l: f64) -> Result<f64> {
    let exact = jc::build_unitary(p, t, l)?;
    Ok(linalg::frobenius(&(approx_unitary(p, t, l)? - exact)))
}

/// Prepares `|e,n⟩`, applies the exact and the approximate `U†(l)`, and
/// returns `1 − |⟨ψ_exact|ψ_approx⟩|` with the approximate state
/// renormalized first.
pub fn state_infidelity(p: &JCParams, t: &FockTruncation, l: f64, n: usize) -> Result<f64> {
    let psi = product_state(n, t)?;
    let exact = psi.apply(&jc::build_unitary(p, t, l)?.adjoint())?;
    let approx = PureState::normalized(approx_unitary(p, t, l)?.adjoint() * psi.amplitudes())?;
    Ok(exact.infidelity(&approx))
}

/// `|⟨ψ_exact|ψ_approx⟩|` in `[0, 1]`; see [`state_infidelity`].
pub fn state_fidelity(p: &JCParams, t: &FockTruncation, l: f64, n: usize) -> Result<f64> {
    Ok((1.0 - state_infidelity(p, t, l, n)?).clamp(0.0, 1.0))
}

/// `⟨ψ_exact|ψ_approx⟩` without renormalizing the approximate state. Real
/// and slightly above 1, because the first-order unitary lengthens vectors
/// by a relative `O((λ/Δ)²)`; its distance from 1 is second order while the
/// renormalized infidelity is sixth order.
pub fn raw_overlap(p: &JCParams, t: &FockTruncation, l: f64, n: usize) -> Result<f64> {
    let psi = product_state(n, t)?;
    let exact = psi.apply(&jc::build_unitary(p, t, l)?.adjoint())?;
    let approx = approx_unitary(p, t, l)?.adjoint() * psi.amplitudes();
    Ok(exact.amplitudes().dotc(&approx).re)
}

/// Ramsey phases `(θ, φ)` with `θ − φ ≡ π (mod 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyPhases {
    theta: f64,
    phi: f64,
}

impl RamseyPhases {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        let r = (theta - phi - PI).rem_euclid(TAU);
        if !(r.min(TAU - r) <= PHASE_TOLERANCE) {
            return Err(Error::Phase { theta, phi });
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// `R_{θ,φ} = (σ₊σ₋ + e^{iθ} σ₋σ₊ + e^{iφ} σ₊ + σ₋)/√2`.
pub fn ramsey(phases: RamseyPhases) -> CMatrix {
    let (g, e) = (Atom::Ground.index(), Atom::Excited.index());
    let mut r = CMatrix::zeros(2, 2);
    r[(e, e)] = linalg::ONE;
    r[(g, g)] = Complex64::from_polar(1.0, phases.theta);
    r[(e, g)] = Complex64::from_polar(1.0, phases.phi);
    r[(g, e)] = linalg::ONE;
    r * linalg::re(FRAC_1_SQRT_2)
}

/// `σ₊ = |e⟩⟨g|` and `σ₋ = |g⟩⟨e|`.
pub fn sigma_operators() -> (CMatrix, CMatrix) {
    let (g, e) = (Atom::Ground.index(), Atom::Excited.index());
    let mut plus = CMatrix::zeros(2, 2);
    plus[(e, g)] = linalg::ONE;
    (plus.clone(), plus.adjoint())
}

/// Ladder operators rebuilt from the two Ramsey pulses `R₁ = R_{π,0}` and
/// `R₂ = R_{0,π}`:
///
/// `σ₊ = ½[√2 (R₁ − R₂) − R₁R₂ + I]`, `σ₋ = ½[√2 (R₁ + R₂) − R₁R₂ − I]`.
pub fn sigma_from_ramsey() -> (CMatrix, CMatrix) {
    let r1 = ramsey(RamseyPhases::new(PI, 0.0).expect("valid phases"));
    let r2 = ramsey(RamseyPhases::new(0.0, PI).expect("valid phases"));
    let id = CMatrix::identity(2, 2);
    let sqrt2 = linalg::re(std::f64::consts::SQRT_2);
    let half = linalg::re(0.5);
    let prod = &r1 * &r2;
    let plus = ((&r1 - &r2) * sqrt2 - &prod + &id) * half;
    let minus = ((&r1 + &r2) * sqrt2 - &prod - &id) * half;
    (plus, minus)
}
