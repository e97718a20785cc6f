//! Pure and mixed states on the truncated photon ⊗ atom space, partial
//! traces, and the Kraus sets induced on each subsystem by the flow unitary.
//!
//! Subsystem matrices use the same orderings as the product basis: photon
//! states `|0⟩ … |n_max⟩`, atom states `(|g⟩, |e⟩)`.

use crate::error::{Error, Result};
use crate::flow::hermiticity_defect;
use crate::jc::{self, basis_index, Atom, FockTruncation, JCParams};
use crate::linalg::{self, CMatrix, CVector};

pub const NORM_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Eigenvalues in `[−EIGEN_CLIP, 0)` count as rounding noise.
pub const EIGEN_CLIP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Domain(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Scales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self { amplitudes: amplitudes / linalg::re(norm) })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = linalg::ONE;
        Self { amplitudes: v }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `1 − |⟨self|other⟩|`, accurate for nearly equal states.
    pub fn infidelity(&self, other: &PureState) -> f64 {
        linalg::infidelity(&self.amplitudes, &other.amplitudes)
    }

    /// Applies an operator without renormalizing.
    pub fn apply(&self, op: &CMatrix) -> Result<Self> {
        if op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: op.ncols() });
        }
        Self::new(op * &self.amplitudes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-10) and positivity
    /// (eigenvalues ≥ −1e-10).
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::NotSquare { rows: entries.nrows(), cols: entries.ncols() });
        }
        let dev = hermiticity_defect(&entries);
        if dev > NORM_TOLERANCE {
            return Err(Error::NotHermitian { max_deviation: dev });
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::Domain(format!("density matrix trace {tr} differs from 1")));
        }
        let min = linalg::hermitian_eigenvalues(&entries).first().copied().unwrap_or(0.0);
        if min < -EIGEN_CLIP {
            return Err(Error::Domain(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(Self { entries })
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Ascending eigenvalues with rounding noise below zero clipped to 0.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.entries)
            .into_iter()
            .map(|e| if (-EIGEN_CLIP..0.0).contains(&e) { 0.0 } else { e })
            .collect()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// `‖ρ² − ρ‖_F`, zero for pure states.
    pub fn idempotency_defect(&self) -> f64 {
        linalg::frobenius(&(&self.entries * &self.entries - &self.entries))
    }
}

/// `ρ = |ψ⟩⟨ψ|`.
pub fn density_from_pure(s: &PureState) -> DensityMatrix {
    let m = linalg::outer(s.amplitudes());
    // exactly Hermitian and rank one; trace is the squared norm
    DensityMatrix { entries: m }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Photon,
    Atom,
}

/// Traces out the complementary subsystem of a state on the product space.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem, t: &FockTruncation) -> Result<DensityMatrix> {
    if rho.dim() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), actual: rho.dim() });
    }
    let m = rho.as_matrix();
    let np = t.photon_dim();
    let out = match keep {
        Subsystem::Atom => CMatrix::from_fn(2, 2, |a, b| (0..np).map(|n| m[(2 * n + a, 2 * n + b)]).sum()),
        Subsystem::Photon => CMatrix::from_fn(np, np, |i, j| (0..2).map(|a| m[(2 * i + a, 2 * j + a)]).sum()),
    };
    DensityMatrix::new(out)
}

/// Checks `1 ≤ n ≤ n_max − 1`, which keeps `|e,n⟩` and both neighbouring
/// blocks clear of the truncation edge.
fn check_prepared(n: usize, t: &FockTruncation) -> Result<()> {
    let max = t.n_max().saturating_sub(1);
    if n < 1 || n > max {
        return Err(Error::Index { n, min: 1, max });
    }
    Ok(())
}

/// The product state `|e⟩|n⟩`.
pub fn product_state(n: usize, t: &FockTruncation) -> Result<PureState> {
    check_prepared(n, t)?;
    Ok(PureState::basis(t.dim(), basis_index(Atom::Excited, n)))
}

/// `|ψ(l)⟩ = U†(l) |ψ⟩`.
pub fn flow_transform_state(s: &PureState, p: &JCParams, t: &FockTruncation, l: f64) -> Result<PureState> {
    let u = jc::build_unitary(p, t, l)?;
    s.apply(&u.adjoint())
}

/// `e^{−iHt} |ψ⟩`.
pub fn time_evolve(s: &PureState, h: &CMatrix, time: f64) -> Result<PureState> {
    s.apply(&linalg::hermitian_propagator(h, time))
}

/// Kraus operators on one subsystem, each tagged with its outcome label:
/// the atom index (`g = 0`, `e = 1`) for the photon set, the photon number
/// `m` for the atom set.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub labels: Vec<usize>,
    pub operators: Vec<CMatrix>,
}

impl KrausSet {
    pub fn dim(&self) -> usize {
        self.operators.first().map_or(0, |k| k.nrows())
    }

    pub fn get(&self, label: usize) -> Option<&CMatrix> {
        self.labels.iter().position(|&l| l == label).map(|i| &self.operators[i])
    }

    /// `Σ K† K`.
    pub fn effect_sum(&self) -> CMatrix {
        let d = self.dim();
        self.operators.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k)
    }

    /// `Σ K K†`.
    pub fn unital_sum(&self) -> CMatrix {
        let d = self.dim();
        self.operators.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k * k.adjoint())
    }

    /// Largest entry of `Σ K†K − I` on the leading `safe` × `safe` corner.
    pub fn completeness_residual(&self, safe: usize) -> f64 {
        let e = self.effect_sum() - CMatrix::identity(self.dim(), self.dim());
        let s = safe.min(self.dim());
        linalg::max_abs(&e.view((0, 0), (s, s)).into_owned())
    }

    /// `‖Σ K K† − I‖_F`; nonzero for a non-unital channel.
    pub fn unitality_deviation(&self) -> f64 {
        linalg::frobenius(&(self.unital_sum() - CMatrix::identity(self.dim(), self.dim())))
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.dim();
        self.operators.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k * rho * k.adjoint())
    }
}

/// Photon-side Kraus set `A_i(l) = ⟨i|U†(l)|e⟩`:
/// `A_e = Σ α_n |n⟩⟨n|`, `A_g = Σ γ_n |n+1⟩⟨n|`. The truncation singleton
/// `|e,n_max⟩` contributes `|n_max⟩⟨n_max|` to `A_e`.
pub fn photon_povm(p: &JCParams, t: &FockTruncation, l: f64) -> Result<KrausSet> {
    let np = t.photon_dim();
    let mut a_e = CMatrix::zeros(np, np);
    let mut a_g = CMatrix::zeros(np, np);
    a_e[(t.n_max(), t.n_max())] = linalg::ONE;
    for n in 0..t.n_max() {
        let c = jc::unitary_coeffs(p, n, l)?;
        a_e[(n, n)] = linalg::re(c.alpha);
        a_g[(n + 1, n)] = linalg::re(c.gamma);
    }
    Ok(KrausSet { labels: vec![Atom::Ground.index(), Atom::Excited.index()], operators: vec![a_g, a_e] })
}

/// Atom-side Kraus set `B_m(l) = ⟨m|U†(l)|n⟩` for the prepared photon
/// number `n`. Only `m ∈ {n−1, n, n+1}` are nonzero:
/// `B_{n−1} = δ_{n−1} σ₊`, `B_n = α_n σ₊σ₋ + β_{n−1} σ₋σ₊`, `B_{n+1} = γ_n σ₋`.
pub fn atom_povm(p: &JCParams, t: &FockTruncation, l: f64, n: usize) -> Result<KrausSet> {
    check_prepared(n, t)?;
    let (g, e) = (Atom::Ground.index(), Atom::Excited.index());
    let below = jc::unitary_coeffs(p, n - 1, l)?;
    let here = jc::unitary_coeffs(p, n, l)?;

    let mut b_lower = CMatrix::zeros(2, 2);
    b_lower[(e, g)] = linalg::re(below.delta_c);
    let mut b_same = CMatrix::zeros(2, 2);
    b_same[(e, e)] = linalg::re(here.alpha);
    b_same[(g, g)] = linalg::re(below.beta);
    let mut b_upper = CMatrix::zeros(2, 2);
    b_upper[(g, e)] = linalg::re(here.gamma);

    Ok(KrausSet { labels: vec![n - 1, n, n + 1], operators: vec![b_lower, b_same, b_upper] })
}
