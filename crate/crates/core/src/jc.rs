//! Jaynes-Cummings Hamiltonian on a truncated Fock space and the closed-form
//! Wegner flow of its two-level blocks.
//!
//! Basis ordering is interleaved and ascending in photon number:
//! `|g,0⟩, |e,0⟩, |g,1⟩, |e,1⟩, …, |g,n_max⟩, |e,n_max⟩`, i.e. index
//! `2n + atom` with `g = 0`, `e = 1`. The Hamiltonian splits into blocks
//! `{|e,n⟩, |g,n+1⟩}` for `n < n_max` plus the singletons `|g,0⟩` and
//! `|e,n_max⟩`. The top singleton only exists because of the truncation.
//!
//! Only `Δ = ω₀ − ω > 0` and `λ > 0` are supported. Negative `Δ` would swap
//! the roles of `A_n` and `B_n`; negative `λ` is equivalent to rephasing
//! `|g⟩ → −|g⟩`. Neither is implemented.

use crate::error::{Error, Result};
use crate::flow::{ode, HermitianMatrix};
use crate::linalg::{self, CMatrix};

/// Physical parameters `(ω₀, ω, λ)`, validated for `Δ > 0` and `λ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JCParams {
    omega0: f64,
    omega: f64,
    lam: f64,
}

impl JCParams {
    pub fn new(omega0: f64, omega: f64, lam: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega.is_finite() && lam.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if !(omega0 - omega > 0.0) {
            return Err(Error::InvalidParams(format!(
                "off-resonance requires detuning omega0 - omega > 0, got {}",
                omega0 - omega
            )));
        }
        if !(lam > 0.0) {
            return Err(Error::InvalidParams(format!("coupling lambda must be > 0, got {lam}")));
        }
        Ok(Self { omega0, omega, lam })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lam
    }

    /// Detuning `Δ = ω₀ − ω`.
    pub fn delta(&self) -> f64 {
        self.omega0 - self.omega
    }

    /// Coupling ratio `λ/Δ`.
    pub fn coupling_ratio(&self) -> f64 {
        self.lam / self.delta()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation {
    n_max: usize,
}

impl FockTruncation {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParams("n_max must be at least 1".into()));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Photon-space dimension `n_max + 1`.
    pub fn photon_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Product-space dimension `2 (n_max + 1)`.
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// Number of intact two-level blocks, `n = 0 … n_max − 1`.
    pub fn blocks(&self) -> usize {
        self.n_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    Ground,
    Excited,
}

impl Atom {
    pub fn index(self) -> usize {
        match self {
            Atom::Ground => 0,
            Atom::Excited => 1,
        }
    }
}

/// Index of `|atom, n⟩` in the product basis.
pub fn basis_index(atom: Atom, n: usize) -> usize {
    2 * n + atom.index()
}

/// Flow coefficients of block `n`: `A_n = ⟨e,n|H(l)|e,n⟩`,
/// `B_n = ⟨g,n+1|H(l)|g,n+1⟩`, `C_n = ⟨e,n|H(l)|g,n+1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockCoeffs {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Block `n` of the flow unitary,
/// `[[α, γ], [δ, β]]` on `{|e,n⟩, |g,n+1⟩}` with `β = α`, `δ = −γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryCoeffs {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_c: f64,
}

/// Energy of the uncoupled `|g,0⟩` state, `B_{−1} = −ω₀/2`. It does not flow.
pub fn ground_vacuum_energy(p: &JCParams) -> f64 {
    -p.omega0 / 2.0
}

/// Energy of the truncation singleton `|e,n_max⟩`.
pub fn top_singleton_energy(p: &JCParams, t: &FockTruncation) -> f64 {
    p.omega0 / 2.0 + p.omega * t.n_max as f64
}

/// `H = (ω₀/2) σ₃ + ω a†a + λ (σ₊ a + σ₋ a†)` on the truncated basis.
pub fn build_hamiltonian(p: &JCParams, t: &FockTruncation) -> HermitianMatrix {
    let dim = t.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for n in 0..=t.n_max {
        let nf = n as f64;
        m[(basis_index(Atom::Ground, n), basis_index(Atom::Ground, n))] = linalg::re(-p.omega0 / 2.0 + p.omega * nf);
        m[(basis_index(Atom::Excited, n), basis_index(Atom::Excited, n))] = linalg::re(p.omega0 / 2.0 + p.omega * nf);
        if n < t.n_max {
            let c = linalg::re(p.lam * (nf + 1.0).sqrt());
            let (e, g) = (basis_index(Atom::Excited, n), basis_index(Atom::Ground, n + 1));
            m[(e, g)] = c;
            m[(g, e)] = c;
        }
    }
    HermitianMatrix::new(m).expect("JC Hamiltonian is real symmetric")
}

/// The 2×2 block `[[A_n(0), C_n(0)], [C_n(0), B_n(0)]]`.
pub fn block_hamiltonian(p: &JCParams, n: usize) -> HermitianMatrix {
    let b = closed_form_block(p, n, 0.0);
    HermitianMatrix::from_real_rows(2, &[b.a, b.c, b.c, b.b]).expect("real symmetric")
}

/// Rabi frequency `Ω_n = √(Δ² + 4λ²(n+1))`.
pub fn rabi_frequency(p: &JCParams, n: usize) -> f64 {
    let d = p.delta();
    (d * d + 4.0 * p.lam * p.lam * (n as f64 + 1.0)).sqrt()
}

/// Shared pieces of the closed forms for block `n` at flow parameter `l`.
struct Profile {
    /// `Δ²/Ω²`
    k: f64,
    /// `1 − Δ²/Ω²`, computed as `4λ²(n+1)/Ω²`
    k_c: f64,
    /// `e^{−Ω² l}`, flushed to zero once it underflows
    s: f64,
    /// `−expm1(−Ω² l)`
    one_minus_s: f64,
    /// `L_n(l)`
    l_n: f64,
    /// `k + (1 − k) s²`, so that `L_n = D^{−1/2}`
    d: f64,
}

fn profile(p: &JCParams, n: usize, l: f64) -> Profile {
    let omega_n = rabi_frequency(p, n);
    let o2 = omega_n * omega_n;
    let k = p.delta() * p.delta() / o2;
    let k_c = 4.0 * p.lam * p.lam * (n as f64 + 1.0) / o2;
    let x = o2 * l;
    // exp(-x) is subnormal past ~708; treat it as zero from there on
    let s = if x > 700.0 { 0.0 } else { (-x).exp() };
    let one_minus_s = -(-x).exp_m1();
    // both forms are exact at their own end: D = 1 at l = 0, D = k as l → ∞
    let d = if s > 0.5 { 1.0 - k_c * one_minus_s * (1.0 + s) } else { k + k_c * s * s };
    Profile { k, k_c, s, one_minus_s, l_n: 1.0 / d.sqrt(), d }
}

fn check_l(l: f64) -> Result<()> {
    if l >= 0.0 && !l.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain(format!("flow parameter must be >= 0, got {l}")))
    }
}

/// `L_n(l) = 1/√(Δ²/Ω² + (1 − Δ²/Ω²) e^{−2Ω² l})`, from 1 at `l = 0` up to
/// `Ω_n/Δ`.
pub fn l_profile(p: &JCParams, n: usize, l: f64) -> f64 {
    profile(p, n, l).l_n
}

/// Closed-form `A_n(l)`, `B_n(l)`, `C_n(l)`.
///
/// `C_n` is evaluated as `λ√(n+1) L_n e^{−Ω² l}`, which equals
/// `(Ω/2)√(1 − Δ²L²/Ω²)` without the cancellation under the root.
pub fn closed_form_block(p: &JCParams, n: usize, l: f64) -> BlockCoeffs {
    let pr = profile(p, n, l);
    let mid = p.omega * (n as f64 + 0.5);
    let half_gap = 0.5 * p.delta() * pr.l_n;
    BlockCoeffs { n, a: mid + half_gap, b: mid - half_gap, c: p.lam * (n as f64 + 1.0).sqrt() * pr.l_n * pr.s }
}

/// `L̃_n(l) = (Δ²/Ω²) L + √((1 − Δ²/Ω²)(1 − Δ²L²/Ω²))`, decreasing from 1 to
/// `Δ/Ω_n`.
///
/// The radicand is evaluated as `(1 − Δ²/Ω²)² e^{−2Ω²l} L²`, which is
/// nonnegative by construction.
pub fn tilde_l(p: &JCParams, n: usize, l: f64) -> Result<f64> {
    check_l(l)?;
    Ok(tilde_pair(&profile(p, n, l)).0)
}

/// `(L̃, 1 − L̃)`, each from the form that is accurate in its regime.
fn tilde_pair(pr: &Profile) -> (f64, f64) {
    let deficit = one_minus_tilde_l(pr);
    if pr.s > 0.5 {
        (1.0 - deficit, deficit)
    } else {
        (pr.l_n * (pr.k + pr.k_c * pr.s), deficit)
    }
}

/// `1 − L̃_n(l)` without cancellation:
/// `k(1−k)(1−s)² / (√D (√D + k + (1−k)s))`.
fn one_minus_tilde_l(pr: &Profile) -> f64 {
    let sd = pr.d.sqrt();
    pr.k * pr.k_c * pr.one_minus_s * pr.one_minus_s / (sd * (sd + pr.k + pr.k_c * pr.s))
}

/// `α_n = β_n = √((1 + L̃_n)/2)`, `γ_n = −δ_n = √((1 − L̃_n)/2)`.
pub fn unitary_coeffs(p: &JCParams, n: usize, l: f64) -> Result<UnitaryCoeffs> {
    check_l(l)?;
    let (lt, deficit) = tilde_pair(&profile(p, n, l));
    let gamma = (0.5 * deficit).sqrt();
    let alpha = (0.5 * (1.0 + lt)).sqrt();
    Ok(UnitaryCoeffs { n, alpha, beta: alpha, gamma, delta_c: -gamma })
}

/// `U(l)` on the truncated basis: identity on `|g,0⟩` (`β_{−1} = 1`) and on
/// `|e,n_max⟩`, block `[[α_n, γ_n], [−γ_n, α_n]]` on `{|e,n⟩, |g,n+1⟩}`.
pub fn build_unitary(p: &JCParams, t: &FockTruncation, l: f64) -> Result<CMatrix> {
    let dim = t.dim();
    let mut u = CMatrix::zeros(dim, dim);
    u[(basis_index(Atom::Ground, 0), basis_index(Atom::Ground, 0))] = linalg::ONE;
    u[(basis_index(Atom::Excited, t.n_max), basis_index(Atom::Excited, t.n_max))] = linalg::ONE;
    for n in 0..t.n_max {
        let c = unitary_coeffs(p, n, l)?;
        let (e, g) = (basis_index(Atom::Excited, n), basis_index(Atom::Ground, n + 1));
        u[(e, e)] = linalg::re(c.alpha);
        u[(e, g)] = linalg::re(c.gamma);
        u[(g, e)] = linalg::re(c.delta_c);
        u[(g, g)] = linalg::re(c.beta);
    }
    Ok(u)
}

/// `H(l)` assembled from the closed-form block coefficients; singletons keep
/// their bare energies.
pub fn flowed_hamiltonian(p: &JCParams, t: &FockTruncation, l: f64) -> HermitianMatrix {
    let dim = t.dim();
    let mut m = CMatrix::zeros(dim, dim);
    m[(0, 0)] = linalg::re(ground_vacuum_energy(p));
    let top = basis_index(Atom::Excited, t.n_max);
    m[(top, top)] = linalg::re(top_singleton_energy(p, t));
    for n in 0..t.n_max {
        let b = closed_form_block(p, n, l);
        let (e, g) = (basis_index(Atom::Excited, n), basis_index(Atom::Ground, n + 1));
        m[(e, e)] = linalg::re(b.a);
        m[(g, g)] = linalg::re(b.b);
        m[(e, g)] = linalg::re(b.c);
        m[(g, e)] = linalg::re(b.c);
    }
    HermitianMatrix::new(m).expect("real symmetric")
}

/// Reads block `n` out of a full truncated matrix.
pub fn extract_block(h: &HermitianMatrix, n: usize) -> BlockCoeffs {
    let (e, g) = (basis_index(Atom::Excited, n), basis_index(Atom::Ground, n + 1));
    BlockCoeffs { n, a: h[(e, e)].re, b: h[(g, g)].re, c: h[(e, g)].re }
}

/// `E_±(n) = ω(n + ½) ± Ω_n/2`, the `l → ∞` limits of `A_n` and `B_n`.
pub fn asymptotic_energies(p: &JCParams, n: usize) -> (f64, f64) {
    let mid = p.omega * (n as f64 + 0.5);
    let half = 0.5 * rabi_frequency(p, n);
    (mid + half, mid - half)
}

/// `ω(n + ½) ± λ√(n+1)`, the `Δ → +0` limit of [`asymptotic_energies`].
pub fn resonant_energies(p: &JCParams, n: usize) -> (f64, f64) {
    let mid = p.omega * (n as f64 + 0.5);
    let g = p.lam * (n as f64 + 1.0).sqrt();
    (mid + g, mid - g)
}

/// Predicted spectrum of [`build_hamiltonian`], ascending:
/// `{−ω₀/2} ∪ {E_±(n)}_{n<n_max} ∪ {ω₀/2 + ω n_max}`.
pub fn predicted_spectrum(p: &JCParams, t: &FockTruncation) -> Vec<f64> {
    let mut ev = vec![ground_vacuum_energy(p), top_singleton_energy(p, t)];
    for n in 0..t.n_max {
        let (ep, em) = asymptotic_energies(p, n);
        ev.push(ep);
        ev.push(em);
    }
    ev.sort_by(f64::total_cmp);
    ev
}

/// Numerical solution of the block flow equations
/// `A' = 2(A−B)C²`, `B' = −2(A−B)C²`, `C' = −(A−B)²C`
/// from the bare couplings, sampled on `grid` (must start at 0).
pub fn integrate_block_flow(
    p: &JCParams,
    n: usize,
    grid: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Vec<(f64, BlockCoeffs)>> {
    integrate_block_from(closed_form_block(p, n, 0.0), grid, rel_tol, abs_tol)
}

/// Same equations from an arbitrary initial block. With `C = 0` every
/// right-hand side vanishes and the rows stay constant.
pub fn integrate_block_from(
    b0: BlockCoeffs,
    grid: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Vec<(f64, BlockCoeffs)>> {
    if grid.first() != Some(&0.0) {
        return Err(Error::InvalidConfig("block flow grid must start at l = 0".into()));
    }
    let gap = b0.a - b0.b;
    let scale2 = gap * gap + 4.0 * b0.c * b0.c;
    let opts = ode::OdeOptions {
        rel_tol,
        abs_tol,
        max_steps: 1_000_000,
        initial_step: if scale2 > 0.0 { 1e-2 / scale2 } else { 1e-2 },
    };
    let rhs = |y: &[f64], dy: &mut [f64]| {
        let gap = y[0] - y[1];
        let c2 = y[2] * y[2];
        dy[0] = 2.0 * gap * c2;
        dy[1] = -2.0 * gap * c2;
        dy[2] = -gap * gap * y[2];
    };
    let n = b0.n;
    let samples = ode::integrate(vec![b0.a, b0.b, b0.c], grid, opts, rhs, |_| {})?;
    Ok(samples.into_iter().map(|s| (s.t, BlockCoeffs { n, a: s.y[0], b: s.y[1], c: s.y[2] })).collect())
}
