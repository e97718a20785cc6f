use super::config::Run;
use super::table::{Cell, Table};
use super::{CliError, Outcome, Sink};
use crate::approx::{self, RamseyPhases, EXPANSION_WARN_RATIO};
use crate::entanglement::{self, nats_to_bits, von_neumann_entropy};
use crate::jc::{self, basis_index, Atom, BlockCoeffs};
use crate::linalg::{self, CMatrix};
use crate::state::{self, density_from_pure, partial_trace, DensityMatrix, Subsystem};

/// Completeness and Kraus-vs-trace residuals are exact up to rounding.
pub(super) const KRAUS_TOLERANCE: f64 = 1e-12;
pub(super) const RAMSEY_TOLERANCE: f64 = 1e-14;
/// Weak-coupling bound on `1 − fidelity`.
pub(super) const FIDELITY_BOUND: f64 = 1e-4;

fn pass_fail(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Dense eigenvalues and the closed-form spectrum, both ascending, paired
/// by rank.
pub(super) fn spectrum_discrepancy(run: &Run) -> (Vec<f64>, Vec<f64>, f64) {
    let eig = jc::build_hamiltonian(&run.params, &run.trunc).eigenvalues();
    let pred = jc::predicted_spectrum(&run.params, &run.trunc);
    let d = pred.iter().zip(&eig).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    (pred, eig, d)
}

pub(super) fn spectrum(run: &Run, sink: &mut Sink) -> Result<Outcome, CliError> {
    let p = &run.params;
    let (pred, eig, worst) = spectrum_discrepancy(run);
    let flowed = jc::flowed_hamiltonian(p, &run.trunc, run.l_max());
    let rank = |e: f64| pred.iter().position(|&x| x == e).expect("energy from the predicted list");

    let mut t =
        Table::new(&["n", "Omega", "E_plus", "E_minus", "eig_plus", "eig_minus", "A_lmax", "B_lmax", "discrepancy"]);
    for n in 0..run.trunc.n_max() {
        let (ep, em) = jc::asymptotic_energies(p, n);
        let (xp, xm) = (eig[rank(ep)], eig[rank(em)]);
        let b = jc::extract_block(&flowed, n);
        t.push(vec![
            n.into(),
            jc::rabi_frequency(p, n).into(),
            ep.into(),
            em.into(),
            xp.into(),
            xm.into(),
            b.a.into(),
            b.b.into(),
            (ep - xp).abs().max((em - xm).abs()).into(),
        ]);
    }
    sink.emit(&t)?;

    let tol = run.cfg.tolerances.check;
    let pass = worst <= tol;
    sink.line(&format!("{} spectrum: max |closed form - eigensolver| = {worst:.3e} (tol {tol:.1e})", pass_fail(pass)));
    Ok(Outcome::from_pass(pass))
}

/// Numeric and analytic block rows for every block on the flow grid, and the
/// largest residual.
pub(super) fn flow_rows(run: &Run) -> Result<(Table, f64), CliError> {
    let p = &run.params;
    let tol = &run.cfg.tolerances;
    let mut t = Table::new(&["l", "n", "A_ode", "B_ode", "C_ode", "A", "B", "C", "res_A", "res_B", "res_C"]);
    let mut worst = 0.0_f64;
    for n in 0..run.trunc.n_max() {
        let mut b0 = jc::closed_form_block(p, n, 0.0);
        if run.cfg.force_diagonal {
            b0.c = 0.0;
        }
        let numeric = jc::integrate_block_from(b0, &run.l_grid, tol.rel, tol.abs)?;
        for (l, num) in numeric {
            let exact: BlockCoeffs = if run.cfg.force_diagonal { b0 } else { jc::closed_form_block(p, n, l) };
            let res = [num.a - exact.a, num.b - exact.b, num.c - exact.c].map(f64::abs);
            worst = res.iter().fold(worst, |m, &r| m.max(r));
            t.push(vec![
                l.into(),
                n.into(),
                num.a.into(),
                num.b.into(),
                num.c.into(),
                exact.a.into(),
                exact.b.into(),
                exact.c.into(),
                res[0].into(),
                res[1].into(),
                res[2].into(),
            ]);
        }
    }
    Ok((t, worst))
}

pub(super) fn flow(run: &Run, sink: &mut Sink) -> Result<Outcome, CliError> {
    let (t, worst) = flow_rows(run)?;
    sink.emit(&t)?;
    let tol = run.cfg.tolerances.check;
    let pass = worst <= tol;
    sink.line(&format!("{} flow: max |ODE - closed form| = {worst:.3e} (tol {tol:.1e})", pass_fail(pass)));
    Ok(Outcome::from_pass(pass))
}

/// Atom and photon entropies from explicit partial traces.
pub(super) fn trace_entropies(rho: &DensityMatrix, run: &Run) -> Result<(f64, f64), CliError> {
    let atom = partial_trace(rho, Subsystem::Atom, &run.trunc)?;
    let photon = partial_trace(rho, Subsystem::Photon, &run.trunc)?;
    Ok((von_neumann_entropy(&atom)?, von_neumann_entropy(&photon)?))
}

pub(super) fn entropy(run: &Run, sink: &mut Sink, bits: bool) -> Result<Outcome, CliError> {
    let p = &run.params;
    let n = run.cfg.n_state;
    let psi = state::product_state(n, &run.trunc)?;
    let h = jc::build_hamiltonian(p, &run.trunc);
    let times = run.t_grid.clone().unwrap_or_else(|| vec![0.0]);
    let unit = |s: f64| if bits { nats_to_bits(s) } else { s };

    let mut t = Table::new(&["l", "t", "n", "s_plus", "s_minus", "S", "S_atom_trace", "S_photon_trace", "residual"]);
    let mut flow_s = Vec::with_capacity(run.l_grid.len());
    let mut worst = 0.0_f64;
    for &l in &run.l_grid {
        let psi_l = state::flow_transform_state(&psi, p, &run.trunc, l)?;
        for &time in &times {
            let (sp, sm) =
                if time == 0.0 { entanglement::s_pm(p, n, l)? } else { entanglement::s_pm_t(p, n, l, time)? };
            let s = entanglement::binary_entropy(sp).max(0.0);
            let evolved = if time == 0.0 { psi_l.clone() } else { state::time_evolve(&psi_l, h.as_matrix(), time)? };
            let (sa, sph) = trace_entropies(&density_from_pure(&evolved), run)?;
            let res = (s - sa).abs().max((s - sph).abs());
            worst = worst.max(res);
            if time == 0.0 {
                flow_s.push(s);
            }
            t.push(vec![
                l.into(),
                time.into(),
                n.into(),
                sp.into(),
                sm.into(),
                unit(s).into(),
                unit(sa).into(),
                unit(sph).into(),
                unit(res).into(),
            ]);
        }
    }
    let k = p.delta() / jc::rabi_frequency(p, n);
    let s_inf = entanglement::asymptotic_entropy(p, n);
    t.push(vec![
        f64::INFINITY.into(),
        0.0.into(),
        n.into(),
        (0.5 * (1.0 + k)).into(),
        (0.5 * (1.0 - k)).into(),
        unit(s_inf).into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
    ]);
    sink.emit(&t)?;

    let tol = run.cfg.tolerances.check;
    let s0 = flow_s.first().copied().unwrap_or(0.0);
    let monotone = flow_s.windows(2).all(|w| w[1] >= w[0] - 1e-14);
    let last = flow_s.last().copied().unwrap_or(0.0);
    let checks = [
        (s0 <= tol, format!("S(0) = {s0:.3e}")),
        (monotone, "S(l) nondecreasing".to_string()),
        (worst <= tol, format!("max |closed form - partial trace| = {worst:.3e} (tol {tol:.1e})")),
    ];
    for (ok, msg) in &checks {
        sink.line(&format!("{} entropy: {msg}", pass_fail(*ok)));
    }
    sink.line(&format!("info entropy: S(l_max) = {:.12e}, asymptote = {:.12e}", unit(last), unit(s_inf)));
    Ok(Outcome::from_pass(checks.iter().all(|c| c.0)))
}

/// `(completeness_ph, completeness_at, unitality_ph, unitality_at,
/// kraus_ph, kraus_at)` at one flow parameter.
pub(super) fn povm_row(run: &Run, l: f64) -> Result<[f64; 6], CliError> {
    let (p, t, n) = (&run.params, &run.trunc, run.cfg.n_state);
    let photon = state::photon_povm(p, t, l)?;
    let atom = state::atom_povm(p, t, l, n)?;
    let psi = state::flow_transform_state(&state::product_state(n, t)?, p, t, l)?;
    let rho = density_from_pure(&psi);

    let mut n_proj = CMatrix::zeros(t.photon_dim(), t.photon_dim());
    n_proj[(n, n)] = linalg::ONE;
    let mut e_proj = CMatrix::zeros(2, 2);
    e_proj[(Atom::Excited.index(), Atom::Excited.index())] = linalg::ONE;

    let ph_trace = partial_trace(&rho, Subsystem::Photon, t)?;
    let at_trace = partial_trace(&rho, Subsystem::Atom, t)?;
    let k_ph = linalg::max_abs(&(photon.apply(&n_proj) - ph_trace.as_matrix()));
    let k_at = linalg::max_abs(&(atom.apply(&e_proj) - at_trace.as_matrix()));
    Ok([
        photon.completeness_residual(t.photon_dim()),
        atom.completeness_residual(2),
        photon.unitality_deviation(),
        atom.unitality_deviation(),
        k_ph,
        k_at,
    ])
}

pub(super) fn povm(run: &Run, sink: &mut Sink) -> Result<Outcome, CliError> {
    // surface an invalid prepared photon number as a config error up front
    state::product_state(run.cfg.n_state, &run.trunc)?;
    let mut t = Table::new(&[
        "l",
        "completeness_photon",
        "completeness_atom",
        "unitality_photon",
        "unitality_atom",
        "kraus_residual_photon",
        "kraus_residual_atom",
    ]);
    let (mut complete, mut kraus, mut unital) = (0.0_f64, 0.0_f64, 0.0_f64);
    for &l in &run.l_grid {
        let r = povm_row(run, l)?;
        complete = complete.max(r[0]).max(r[1]);
        kraus = kraus.max(r[4]).max(r[5]);
        unital = r[2].max(r[3]);
        let mut row: Vec<Cell> = vec![l.into()];
        row.extend(r.iter().map(|&x| Cell::from(x)));
        t.push(row);
    }
    sink.emit(&t)?;

    let ok_c = complete <= KRAUS_TOLERANCE;
    let ok_k = kraus <= KRAUS_TOLERANCE;
    sink.line(&format!("{} povm: max completeness residual = {complete:.3e}", pass_fail(ok_c)));
    sink.line(&format!("{} povm: max Kraus vs partial trace = {kraus:.3e}", pass_fail(ok_k)));
    sink.line(&format!(
        "info povm: unitality deviation at l_max = {unital:.3e} ({})",
        if unital > 1e-3 { "non-unital" } else { "not witnessed above 1e-3" }
    ));
    Ok(Outcome::from_pass(ok_c && ok_k))
}

/// Largest entry error of the ladder operators rebuilt from Ramsey pulses.
pub(super) fn ramsey_identity_error() -> (f64, f64) {
    let (plus, minus) = approx::sigma_from_ramsey();
    let (sp, sm) = approx::sigma_operators();
    (linalg::max_abs(&(plus - sp)), linalg::max_abs(&(minus - sm)))
}

pub(super) fn approx(run: &Run, sink: &mut Sink) -> Result<Outcome, CliError> {
    let (p, tr, n) = (&run.params, &run.trunc, run.cfg.n_state);
    state::product_state(n, tr)?;
    let ratio = p.coupling_ratio();
    let in_regime = approx::in_expansion_regime(p);
    if !in_regime {
        sink.line(&format!(
            "warning: lambda/Delta = {ratio:.3e} exceeds {EXPANSION_WARN_RATIO}; the first-order unitary is outside its regime"
        ));
    }

    let mut t = Table::new(&["l", "epsilon", "fidelity", "infidelity", "non_unitarity", "operator_error"]);
    let mut worst = 0.0_f64;
    for &l in &run.l_grid {
        let u = approx::approx_unitary(p, tr, l)?;
        let (e, g) = (basis_index(Atom::Excited, 0), basis_index(Atom::Ground, 1));
        let inf = approx::state_infidelity(p, tr, l, n)?;
        worst = worst.max(inf);
        t.push(vec![
            l.into(),
            u[(e, g)].re.into(),
            (1.0 - inf).into(),
            inf.into(),
            linalg::unitarity_defect(&u).into(),
            approx::operator_error(p, tr, l)?.into(),
        ]);
    }
    sink.emit(&t)?;

    let (ep, em) = ramsey_identity_error();
    let r1 = approx::ramsey(RamseyPhases::new(std::f64::consts::PI, 0.0)?);
    let r2 = approx::ramsey(RamseyPhases::new(0.0, std::f64::consts::PI)?);
    let unit = linalg::unitarity_defect(&r1).max(linalg::unitarity_defect(&r2));
    let mut checks = vec![
        (ep <= RAMSEY_TOLERANCE, format!("sigma_plus from Ramsey pulses, max error {ep:.3e}")),
        (em <= RAMSEY_TOLERANCE, format!("sigma_minus from Ramsey pulses, max error {em:.3e}")),
        (unit <= 1e-12, format!("Ramsey pulses unitary, defect {unit:.3e}")),
    ];
    if in_regime {
        checks.push((worst <= FIDELITY_BOUND, format!("max 1 - fidelity = {worst:.3e} (bound {FIDELITY_BOUND:.0e})")));
    } else {
        sink.line(&format!("info approx: max 1 - fidelity = {worst:.3e}"));
    }
    for (ok, msg) in &checks {
        sink.line(&format!("{} approx: {msg}", pass_fail(*ok)));
    }
    Ok(Outcome::from_pass(checks.iter().all(|c| c.0)))
}
