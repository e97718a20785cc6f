//! Headless invariant suite behind `jcflow verify`.

use std::f64::consts::{PI, TAU};

use super::commands::{self, FIDELITY_BOUND, KRAUS_TOLERANCE, RAMSEY_TOLERANCE};
use super::config::Run;
use super::table::{Cell, Table};
use super::{CliError, Outcome, Sink};
use crate::approx::{self, RamseyPhases};
use crate::entanglement;
use crate::flow::{self, IntegratorConfig};
use crate::jc::{self, basis_index, Atom, FockTruncation, JCParams};
use crate::linalg;
use crate::state::{self, density_from_pure};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Bound {
    AtMost(f64),
    Above(f64),
}

#[derive(Debug, Clone)]
struct Check {
    name: String,
    value: f64,
    bound: Bound,
}

impl Check {
    fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost(t) => self.value <= t,
            Bound::Above(t) => self.value > t,
        }
    }
}

#[derive(Default)]
struct Suite {
    checks: Vec<Check>,
    skipped: Vec<(String, String)>,
}

impl Suite {
    fn at_most(&mut self, name: &str, value: f64, tol: f64) {
        self.checks.push(Check { name: name.into(), value, bound: Bound::AtMost(tol) });
    }

    fn above(&mut self, name: &str, value: f64, floor: f64) {
        self.checks.push(Check { name: name.into(), value, bound: Bound::Above(floor) });
    }

    /// Boolean property, stored as 0 (holds) or 1 (violated).
    fn holds(&mut self, name: &str, ok: bool) {
        self.at_most(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }

    fn skip(&mut self, name: &str, why: &str) {
        self.skipped.push((name.into(), why.into()));
    }
}

fn log_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    flow::log_grid(lo, hi, count)
}

pub(super) fn verify(run: &Run, sink: &mut Sink) -> Result<Outcome, CliError> {
    let p = run.params;
    let t = run.trunc;
    let rel = run.cfg.tolerances.rel;
    let abs = run.cfg.tolerances.abs;
    let mut s = Suite::default();
    let state_ok = state::product_state(run.cfg.n_state, &t).is_ok();
    // closed-form entropy checks need only a block, not a prepared state
    let n = if state_ok { run.cfg.n_state } else { 0 };

    // spectrum
    let (_, _, d) = commands::spectrum_discrepancy(run);
    s.at_most("spectrum.eigensolver", d, 1e-9);

    // block ODE against closed form
    let mut worst = 0.0_f64;
    for b in 0..t.n_max() {
        let o2 = jc::rabi_frequency(&p, b).powi(2);
        let grid = log_points(1e-3 / o2, 50.0 / o2, 40);
        for (l, num) in jc::integrate_block_flow(&p, b, &grid, rel, abs)? {
            let ex = jc::closed_form_block(&p, b, l);
            worst = worst.max((num.a - ex.a).abs()).max((num.b - ex.b).abs()).max((num.c - ex.c).abs());
        }
    }
    s.at_most("flow.block_ode", worst, 1e-8);

    // generic engine on the full truncated matrix
    let h0 = jc::build_hamiltonian(&p, &t);
    let o0 = jc::rabi_frequency(&p, 0).powi(2);
    let cfg = IntegratorConfig::log_spaced(1e-3 / o0, 50.0 / o0, 12).tolerances(rel, abs);
    let traj = flow::integrate_flow(&h0, &cfg, true)?;
    let singletons = [basis_index(Atom::Ground, 0), basis_index(Atom::Excited, t.n_max())];
    let (mut dh, mut du, mut dsingle, mut dtrace) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let traces: Vec<f64> = (1..=3).map(|k| h0.trace_power(k)).collect();
    for smp in &traj.samples {
        let exact = jc::flowed_hamiltonian(&p, &t, smp.l);
        dh = dh.max(linalg::max_abs(&(smp.h.as_matrix() - exact.as_matrix())));
        for &i in &singletons {
            for j in 0..t.dim() {
                dsingle = dsingle.max((smp.h[(i, j)] - h0[(i, j)]).norm());
            }
        }
        for (k, tr0) in (1..=3).zip(&traces) {
            dtrace = dtrace.max((smp.h.trace_power(k) - tr0).abs() / tr0.abs().max(1.0));
        }
        if let Some(u) = &smp.unitary {
            du = du.max(linalg::max_abs(&(u - jc::build_unitary(&p, &t, smp.l)?)));
        }
    }
    s.at_most("flow.generic_vs_closed_form", dh, 1e-7);
    s.at_most("flow.singletons_fixed", dsingle, 1e-12);
    s.at_most("flow.trace_invariants", dtrace, 1e-8);
    s.at_most("flow.unitary_vs_ode", du, 1e-7);
    s.holds("flow.no_stalled_pairs", traj.diagnostics().stalled_pairs.is_empty());

    // closed-form unitary
    let (mut conj, mut unit) = (0.0_f64, 0.0_f64);
    for &l in &log_points(1e-3 / o0, 50.0 / o0, 10)[1..] {
        let u = jc::build_unitary(&p, &t, l)?;
        let lhs = &u * h0.as_matrix() * u.adjoint();
        conj = conj.max(linalg::frobenius(&(lhs - jc::flowed_hamiltonian(&p, &t, l).as_matrix())));
        unit = unit.max(linalg::unitarity_defect(&u));
    }
    s.at_most("jc.unitary_conjugation", conj, 1e-10);
    s.at_most("jc.unitarity", unit, 1e-12);

    // entropy along the flow
    let on2 = jc::rabi_frequency(&p, n).powi(2);
    let grid = log_points(1e-3 / on2, 50.0 / on2, 20);
    let flow_s = entanglement::entropy_flow(&p, n, &grid)?;
    s.at_most("entropy.s0_zero", flow_s[0].entropy, 0.0);
    s.holds("entropy.nondecreasing", flow_s.windows(2).all(|w| w[1].entropy >= w[0].entropy - 1e-14));
    let far = entanglement::entropy_flow(&p, n, &[1e3 / on2])?[0].entropy;
    s.at_most("entropy.asymptote", (far - entanglement::asymptotic_entropy(&p, n)).abs(), 1e-10);

    let amps: Vec<f64> = [0.0, 1.0, 10.0]
        .iter()
        .map(|&x| entanglement::period_amplitude(&p, n, x / on2, 257))
        .collect::<Result<_, _>>()?;
    s.holds("time.amplitude_decreasing", amps.windows(2).all(|w| w[1] < w[0]));
    s.at_most("time.amplitude_at_100", entanglement::period_amplitude(&p, n, 100.0 / on2, 257)?, 1e-6);

    if state_ok {
        let psi = state::product_state(n, &t)?;
        let mut e_worst = 0.0_f64;
        for smp in &flow_s[1..] {
            let rho = density_from_pure(&state::flow_transform_state(&psi, &p, &t, smp.l)?);
            let (sa, sph) = commands::trace_entropies(&rho, run)?;
            e_worst = e_worst.max((smp.entropy - sa).abs()).max((smp.entropy - sph).abs());
        }
        s.at_most("entropy.partial_trace", e_worst, 1e-9);

        let period = TAU / jc::rabi_frequency(&p, n);
        let mut t_worst = 0.0_f64;
        for x in [0.0, 1.0, 10.0] {
            let psi_l = state::flow_transform_state(&psi, &p, &t, x / on2)?;
            for k in 0..=16 {
                let time = period * k as f64 / 16.0;
                let evolved = state::time_evolve(&psi_l, h0.as_matrix(), time)?;
                let (sa, _) = commands::trace_entropies(&density_from_pure(&evolved), run)?;
                let (sp, _) = entanglement::s_pm_t(&p, n, x / on2, time)?;
                t_worst = t_worst.max((entanglement::binary_entropy(sp) - sa).abs());
            }
        }
        s.at_most("time.brute_force", t_worst, 1e-8);

        let (mut complete, mut kraus, mut unital) = (0.0_f64, 0.0_f64, 0.0_f64);
        for &l in &grid {
            let r = commands::povm_row(run, l)?;
            complete = complete.max(r[0]).max(r[1]);
            kraus = kraus.max(r[4]).max(r[5]);
            unital = r[2].max(r[3]);
        }
        s.at_most("povm.completeness", complete, KRAUS_TOLERANCE);
        s.at_most("povm.kraus_vs_partial_trace", kraus, KRAUS_TOLERANCE);
        // the deviation is of order (λ/Δ)², so the fixed witness level only
        // applies outside weak coupling
        let floor = if p.coupling_ratio() >= approx::EXPANSION_WARN_RATIO { 1e-3 } else { 0.0 };
        s.above("povm.non_unital", unital, floor);
    } else {
        for name in [
            "entropy.partial_trace",
            "time.brute_force",
            "povm.completeness",
            "povm.kraus_vs_partial_trace",
            "povm.non_unital",
        ] {
            s.skip(name, "needs n_max >= 2 for a prepared state");
        }
    }

    // Ramsey algebra
    let (ep, em) = commands::ramsey_identity_error();
    s.at_most("ramsey.sigma_plus", ep, RAMSEY_TOLERANCE);
    s.at_most("ramsey.sigma_minus", em, RAMSEY_TOLERANCE);
    let mut r_unit = 0.0_f64;
    for k in 0..100 {
        let phi = -10.0 + 20.0 * k as f64 / 99.0;
        let theta = phi + PI + TAU * ((k % 5) as f64 - 2.0);
        r_unit = r_unit.max(linalg::unitarity_defect(&approx::ramsey(RamseyPhases::new(theta, phi)?)));
    }
    s.at_most("ramsey.unitary", r_unit, 1e-12);

    // weak-coupling approximation at a fixed reference ratio
    let ratio = 1e-3;
    let weak = JCParams::new(p.omega0(), p.omega(), ratio * p.delta())?;
    let small = FockTruncation::new(4)?;
    let d2 = weak.delta().powi(2);
    let (mut inf, mut op) = (0.0_f64, 0.0_f64);
    for &l in &log_points(1e-2 / d2, 1e3 / d2, 20) {
        inf = inf.max(approx::state_infidelity(&weak, &small, l, 1)?);
        op = op.max(approx::operator_error(&weak, &small, l)?);
    }
    s.at_most("approx.infidelity", inf, FIDELITY_BOUND);
    s.at_most("approx.operator_error", op, 10.0 * ratio * ratio);

    let mut artifact = Table::new(&["check", "value", "relation", "bound", "status"]);
    for c in &s.checks {
        let (rel, bound) = match c.bound {
            Bound::AtMost(b) => ("<=", b),
            Bound::Above(b) => (">", b),
        };
        let status = if c.passed() { "PASS" } else { "FAIL" };
        sink.line(&format!("{status} {} value={:.3e} {rel} {bound:.1e}", c.name, c.value));
        artifact.push(vec![c.name.as_str().into(), c.value.into(), rel.into(), bound.into(), status.into()]);
    }
    for (name, why) in &s.skipped {
        sink.line(&format!("SKIP {name} ({why})"));
        artifact.push(vec![name.as_str().into(), Cell::Empty, Cell::Empty, Cell::Empty, "SKIP".into()]);
    }
    if sink.output.is_some() {
        sink.emit(&artifact)?;
    }
    let failed = s.checks.iter().filter(|c| !c.passed()).count();
    sink.line(&format!("{} checks, {failed} failed, {} skipped", s.checks.len(), s.skipped.len()));
    Ok(Outcome::from_pass(failed == 0))
}
