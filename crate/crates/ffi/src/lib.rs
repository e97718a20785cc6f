//! C ABI for `jcflow`.
//!
//! Every entry point returns a [`JcStatus`]. On failure a message is kept in
//! thread-local storage and can be read with [`jc_last_error_message`].
//! Objects are opaque handles released with their `_free` function.
//!
//! Matrices cross the boundary as row-major interleaved complex buffers:
//! entry `(i, j)` occupies `buf[2 * (i * dim + j)]` (real part) and the
//! following slot (imaginary part), so a `dim × dim` matrix needs
//! `2 * dim * dim` doubles.
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the access described in each
//! function's documentation. Null pointers are reported as
//! [`JcStatus::NullPointer`]; other invalid pointers are undefined behaviour.

#![allow(clippy::missing_safety_doc)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jcflow::flow::{self, FlowTrajectory, HermitianMatrix, IntegratorConfig};
use jcflow::jc::{self, FockTruncation, JCParams};
use jcflow::{entanglement, CMatrix, Error};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    InvalidConfig = 3,
    Domain = 4,
    Index = 5,
    Phase = 6,
    NotHermitian = 7,
    DimensionMismatch = 8,
    IntegratorFailure = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// Block coefficients `A_n`, `B_n`, `C_n` at one flow parameter.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct JcBlock {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Block unitary `[[alpha, gamma], [delta, beta]]`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct JcUnitaryBlock {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Model parameters plus Fock truncation.
pub struct JcModel {
    params: JCParams,
    trunc: FockTruncation,
}

/// Sampled flow of a Hermitian matrix.
pub struct JcTrajectory {
    inner: FlowTrajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> JcStatus {
    match e {
        Error::InvalidParams(_) => JcStatus::InvalidParams,
        Error::InvalidConfig(_) => JcStatus::InvalidConfig,
        Error::Domain(_) => JcStatus::Domain,
        Error::Index { .. } => JcStatus::Index,
        Error::Phase { .. } => JcStatus::Phase,
        Error::NotHermitian { .. } => JcStatus::NotHermitian,
        Error::EmptyMatrix | Error::NotSquare { .. } | Error::DimensionMismatch { .. } => JcStatus::DimensionMismatch,
        Error::StepLimitExceeded { .. } | Error::ToleranceFailure { .. } => JcStatus::IntegratorFailure,
    }
}

struct Failure(JcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(JcStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure and turns panics into [`JcStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> JcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            JcStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(m: *const JcModel) -> Result<&'a JcModel, Failure> {
    m.as_ref().ok_or_else(|| null("model"))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_matrix(m: &CMatrix, buf: *mut f64, len: usize) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    let need = 2 * m.nrows() * m.ncols();
    if len < need {
        return Err(Failure(JcStatus::BufferTooSmall, format!("buffer holds {len} doubles, need {need}")));
    }
    let out = std::slice::from_raw_parts_mut(buf, need);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let k = 2 * (i * m.ncols() + j);
            out[k] = m[(i, j)].re;
            out[k + 1] = m[(i, j)].im;
        }
    }
    Ok(())
}

/// Message for the last failed call on this thread, or null after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn jc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a model. Requires `omega0 > omega`, `lambda > 0`, `n_max >= 1`.
#[no_mangle]
pub unsafe extern "C" fn jc_model_new(
    omega0: f64,
    omega: f64,
    lambda: f64,
    n_max: usize,
    out: *mut *mut JcModel,
) -> JcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let model = JcModel { params: JCParams::new(omega0, omega, lambda)?, trunc: FockTruncation::new(n_max)? };
        out.write(Box::into_raw(Box::new(model)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn jc_model_free(m: *mut JcModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension `2(n_max + 1)` of the truncated space.
#[no_mangle]
pub unsafe extern "C" fn jc_model_dim(m: *const JcModel, out: *mut usize) -> JcStatus {
    guard(|| write_out(out, model_ref(m)?.trunc.dim(), "out"))
}

/// `Omega_n = sqrt(Delta^2 + 4 lambda^2 (n + 1))`.
#[no_mangle]
pub unsafe extern "C" fn jc_rabi_frequency(m: *const JcModel, n: usize, out: *mut f64) -> JcStatus {
    guard(|| write_out(out, jc::rabi_frequency(&model_ref(m)?.params, n), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn jc_closed_form_block(m: *const JcModel, n: usize, l: f64, out: *mut JcBlock) -> JcStatus {
    guard(|| {
        if !(l >= 0.0) {
            return Err(Error::Domain(format!("flow parameter must be >= 0, got {l}")).into());
        }
        let b = jc::closed_form_block(&model_ref(m)?.params, n, l);
        write_out(out, JcBlock { a: b.a, b: b.b, c: b.c }, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn jc_unitary_coeffs(m: *const JcModel, n: usize, l: f64, out: *mut JcUnitaryBlock) -> JcStatus {
    guard(|| {
        let u = jc::unitary_coeffs(&model_ref(m)?.params, n, l)?;
        write_out(out, JcUnitaryBlock { alpha: u.alpha, beta: u.beta, gamma: u.gamma, delta: u.delta_c }, "out")
    })
}

/// Atom populations `s_+`, `s_-` of the flow-transformed state `|e, n>`.
#[no_mangle]
pub unsafe extern "C" fn jc_s_pm(m: *const JcModel, n: usize, l: f64, s_plus: *mut f64, s_minus: *mut f64) -> JcStatus {
    guard(|| {
        let (sp, sm) = entanglement::s_pm(&model_ref(m)?.params, n, l)?;
        write_out(s_plus, sp, "s_plus")?;
        write_out(s_minus, sm, "s_minus")
    })
}

/// Entanglement entropy (nats) after flowing to `l` and evolving for time
/// `t`; `t = 0` gives the flow entropy.
#[no_mangle]
pub unsafe extern "C" fn jc_entropy(m: *const JcModel, n: usize, l: f64, t: f64, out: *mut f64) -> JcStatus {
    guard(|| {
        let p = &model_ref(m)?.params;
        let s = if t == 0.0 {
            entanglement::entropy_flow(p, n, &[l])?[0].entropy
        } else {
            entanglement::entropy_time_evolution(p, n, l, &[t])?[0].entropy
        };
        write_out(out, s, "out")
    })
}

/// Writes `H(l)` into `buf` (`2 * dim * dim` doubles). `l = 0` is the bare
/// Hamiltonian.
#[no_mangle]
pub unsafe extern "C" fn jc_flowed_hamiltonian(m: *const JcModel, l: f64, buf: *mut f64, len: usize) -> JcStatus {
    guard(|| {
        let m = model_ref(m)?;
        if !(l >= 0.0) {
            return Err(Error::Domain(format!("flow parameter must be >= 0, got {l}")).into());
        }
        write_matrix(jc::flowed_hamiltonian(&m.params, &m.trunc, l).as_matrix(), buf, len)
    })
}

/// Writes the flow unitary `U(l)` into `buf` (`2 * dim * dim` doubles).
#[no_mangle]
pub unsafe extern "C" fn jc_unitary(m: *const JcModel, l: f64, buf: *mut f64, len: usize) -> JcStatus {
    guard(|| {
        let m = model_ref(m)?;
        write_matrix(&jc::build_unitary(&m.params, &m.trunc, l)?, buf, len)
    })
}

/// Integrates the Wegner flow of a Hermitian `dim × dim` matrix given as an
/// interleaved complex buffer, sampling at the `grid_len` increasing points
/// of `grid` (the sample at `l = 0` is always included). Tolerances of 0
/// select the defaults.
#[no_mangle]
pub unsafe extern "C" fn jc_flow_integrate(
    h: *const f64,
    dim: usize,
    grid: *const f64,
    grid_len: usize,
    rel_tol: f64,
    abs_tol: f64,
    accumulate_unitary: bool,
    out: *mut *mut JcTrajectory,
) -> JcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        if h.is_null() {
            return Err(null("h"));
        }
        if grid.is_null() || grid_len == 0 {
            return Err(Failure(JcStatus::InvalidConfig, "sample grid is empty".into()));
        }
        let raw = std::slice::from_raw_parts(h, 2 * dim * dim);
        let m = CMatrix::from_fn(dim, dim, |i, j| {
            let k = 2 * (i * dim + j);
            Complex64::new(raw[k], raw[k + 1])
        });
        let h0 = HermitianMatrix::new(m)?;
        let mut cfg = IntegratorConfig::with_grid(std::slice::from_raw_parts(grid, grid_len).to_vec());
        if rel_tol != 0.0 || abs_tol != 0.0 {
            cfg = cfg.tolerances(rel_tol, abs_tol);
        }
        let inner = flow::integrate_flow(&h0, &cfg, accumulate_unitary)?;
        out.write(Box::into_raw(Box::new(JcTrajectory { inner })));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn jc_trajectory_free(t: *mut JcTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

unsafe fn sample<'a>(t: *const JcTrajectory, i: usize) -> Result<&'a flow::FlowSample, Failure> {
    let t = t.as_ref().ok_or_else(|| null("trajectory"))?;
    t.inner
        .samples
        .get(i)
        .ok_or_else(|| Failure(JcStatus::Index, format!("sample {i} out of range (trajectory has {})", t.inner.len())))
}

#[no_mangle]
pub unsafe extern "C" fn jc_trajectory_len(t: *const JcTrajectory, out: *mut usize) -> JcStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("trajectory"))?;
        write_out(out, t.inner.len(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn jc_trajectory_l(t: *const JcTrajectory, i: usize, out: *mut f64) -> JcStatus {
    guard(|| write_out(out, sample(t, i)?.l, "out"))
}

/// Off-diagonal Frobenius norm of sample `i`.
#[no_mangle]
pub unsafe extern "C" fn jc_trajectory_offdiag_norm(t: *const JcTrajectory, i: usize, out: *mut f64) -> JcStatus {
    guard(|| write_out(out, sample(t, i)?.offdiag_norm, "out"))
}

#[no_mangle]
pub unsafe extern "C" fn jc_trajectory_hamiltonian(
    t: *const JcTrajectory,
    i: usize,
    buf: *mut f64,
    len: usize,
) -> JcStatus {
    guard(|| write_matrix(sample(t, i)?.h.as_matrix(), buf, len))
}

/// Fails with [`JcStatus::InvalidConfig`] when the flow ran without the
/// unitary.
#[no_mangle]
pub unsafe extern "C" fn jc_trajectory_unitary(
    t: *const JcTrajectory,
    i: usize,
    buf: *mut f64,
    len: usize,
) -> JcStatus {
    guard(|| {
        let u = sample(t, i)?
            .unitary
            .as_ref()
            .ok_or_else(|| Failure(JcStatus::InvalidConfig, "trajectory carries no unitary".into()))?;
        write_matrix(u, buf, len)
    })
}
