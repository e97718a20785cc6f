//! Wegner flow equations for finite Hermitian matrices, with closed-form
//! solutions for the Jaynes-Cummings model.
//!
//! Modules:
//! - [`flow`]: generic double-bracket flow engine and adaptive integrator.
//! - [`jc`]: Jaynes-Cummings Hamiltonian on a truncated Fock space and the
//!   analytic flow of each two-level block.
//! - [`state`]: product states, flow-transformed states, partial traces and
//!   the photon/atom Kraus sets.
//! - [`entanglement`]: von Neumann entropies along the flow and in time.
//! - [`approx`]: first-order approximation of the flow unitary and the
//!   Ramsey-zone operator algebra.
//! - [`cli`]: the `jcflow` command-line front end.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// reference values in tests keep every digit of the high-precision oracle
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod approx;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod flow;
pub mod jc;
pub mod linalg;
pub mod state;

pub use error::{Error, Result};
pub use flow::{FlowTrajectory, HermitianMatrix, IntegratorConfig};
pub use jc::{BlockCoeffs, FockTruncation, JCParams, UnitaryCoeffs};
pub use linalg::{CMatrix, CVector};
