use super::*;
use crate::linalg::re;
use proptest::prelude::*;

fn block(a: f64, b: f64, c: f64) -> HermitianMatrix {
    HermitianMatrix::from_real_rows(2, &[a, c, c, b]).unwrap()
}

fn random_hermitian(dim: usize, seed: u64) -> HermitianMatrix {
    // xorshift, enough for test fixtures
    let mut s = seed.max(1);
    let mut next = || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = re(2.0 * i as f64 + next());
        for j in i + 1..dim {
            let z = Complex64::new(next(), next()) * 0.6;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianMatrix::new(m).unwrap()
}

#[test]
fn diagonal_part_of_identity_and_2x2() {
    let id = HermitianMatrix::identity(3).unwrap();
    assert_eq!(diagonal_part(&id), id);
    let h =
        HermitianMatrix::from_row_slice(2, &[re(1.5), Complex64::new(0.2, 0.7), Complex64::new(0.2, -0.7), re(-0.5)])
            .unwrap();
    assert_eq!(diagonal_part(&h), HermitianMatrix::from_diagonal(&[1.5, -0.5]).unwrap());
}

#[test]
fn generator_vanishes_on_diagonal() {
    let h = HermitianMatrix::from_diagonal(&[1.0, -3.0, 2.5]).unwrap();
    assert_eq!(linalg::max_abs(&wegner_generator(&h)), 0.0);
    assert!(linalg::max_abs(flow_rhs(&h).as_matrix()) <= 1e-14);
}

#[test]
fn generator_on_two_level_block() {
    // a - b = 0.2, c = 0.1: eta_12 = (a - b) c, eta_21 = -(a - b) c
    let h = block(0.6, 0.4, 0.1);
    let eta = wegner_generator(&h);
    assert!((eta[(0, 1)] - re(0.2 * 0.1)).norm() < 1e-16);
    assert!((eta[(1, 0)] - re(-0.2 * 0.1)).norm() < 1e-16);
    assert_eq!(eta[(0, 0)], re(0.0));
    // matches the commutator with H_d
    let direct = linalg::commutator(diagonal_part(&h).as_matrix(), h.as_matrix());
    assert!(linalg::max_abs(&(direct - &eta)) < 1e-16);
}

#[test]
fn rhs_on_two_level_block_matches_coefficient_equations() {
    let (a, b, c): (f64, f64, f64) = (0.6, 0.4, 0.1);
    let d = flow_rhs(&block(a, b, c));
    // dA = 2(A-B)C^2, dB = -2(A-B)C^2, dC = -(A-B)^2 C
    assert!((d[(0, 0)].re - 2.0 * (a - b) * c * c).abs() < 1e-16);
    assert!((d[(1, 1)].re + 2.0 * (a - b) * c * c).abs() < 1e-16);
    assert!((d[(0, 1)].re + (a - b).powi(2) * c).abs() < 1e-16);
    assert!((d[(1, 0)].re + (a - b).powi(2) * c).abs() < 1e-16);
}

#[test]
fn offdiag_norm_examples() {
    assert_eq!(offdiag_norm(&HermitianMatrix::from_diagonal(&[1.0, 2.0]).unwrap()), 0.0);
    let x = HermitianMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
    assert!((offdiag_norm(&x) - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn diagonal_matrix_is_a_fixed_point() {
    let h = HermitianMatrix::from_diagonal(&[0.3, -1.0, 2.0]).unwrap();
    let traj = integrate_flow(&h, &IntegratorConfig::log_spaced(1e-3, 10.0, 8), true).unwrap();
    assert_eq!(traj.first().l, 0.0);
    for s in &traj.samples {
        assert_eq!(s.offdiag_norm, 0.0);
        assert!(linalg::max_abs(&(s.h.as_matrix() - h.as_matrix())) <= 1e-14);
        assert!(linalg::unitarity_defect(s.unitary.as_ref().unwrap()) <= 1e-14);
    }
}

#[test]
fn random_4x4_flows_to_its_spectrum() {
    let h0 = random_hermitian(4, 7);
    let cfg = IntegratorConfig::log_spaced(1e-3, 200.0, 30);
    let traj = integrate_flow(&h0, &cfg, true).unwrap();
    let last = traj.last();
    assert!(last.offdiag_norm < 1e-6, "offdiag = {}", last.offdiag_norm);

    let mut diag = last.h.diagonal();
    diag.sort_by(f64::total_cmp);
    let eig = h0.eigenvalues();
    for (d, e) in diag.iter().zip(&eig) {
        assert!((d - e).abs() < 1e-6, "{d} vs {e}");
    }
    assert!(traj.diagnostics().stalled_pairs.is_empty());
}

#[test]
fn trajectory_invariants_on_random_matrix() {
    let h0 = random_hermitian(5, 99);
    let traj = integrate_flow(&h0, &IntegratorConfig::log_spaced(1e-3, 50.0, 25), true).unwrap();
    let t0: Vec<f64> = (1..=3).map(|k| h0.trace_power(k)).collect();
    let mut prev = f64::INFINITY;
    let mut prev_l = -1.0;
    for s in &traj.samples {
        assert!(s.l > prev_l);
        prev_l = s.l;
        for (k, t) in (1..=3).zip(&t0) {
            assert!((s.h.trace_power(k) - t).abs() <= 1e-8, "tr H^{k} drifted at l = {}", s.l);
        }
        assert!(s.offdiag_norm <= prev + 1e-10);
        prev = s.offdiag_norm;

        let u = s.unitary.as_ref().unwrap();
        assert!(linalg::unitarity_defect(u) <= 1e-8);
        let rebuilt = u * h0.as_matrix() * u.adjoint();
        assert!(linalg::max_abs(&(rebuilt - s.h.as_matrix())) <= 1e-8, "l = {}", s.l);
    }
}

#[test]
fn unitary_without_reorthonormalization_stays_close() {
    let h0 = random_hermitian(3, 3);
    let mut cfg = IntegratorConfig::log_spaced(1e-3, 20.0, 10);
    cfg.reorthonormalize = false;
    let traj = integrate_flow(&h0, &cfg, true).unwrap();
    assert!(linalg::unitarity_defect(traj.last().unitary.as_ref().unwrap()) <= 1e-8);
}

#[test]
fn degenerate_coupled_pair_is_reported_as_stalled() {
    let h = HermitianMatrix::from_real_rows(3, &[1.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
    let traj = integrate_flow(&h, &IntegratorConfig::log_spaced(1e-3, 50.0, 10), false).unwrap();
    let diag = traj.diagnostics();
    assert!(diag.offdiag_norm > 0.1);
    assert_eq!(diag.stalled_pairs, vec![(0, 1)]);
}

#[test]
fn step_limit_and_config_errors() {
    let h0 = random_hermitian(3, 5);
    let mut cfg = IntegratorConfig::log_spaced(1e-3, 100.0, 5);
    cfg.max_steps = 2;
    assert!(matches!(integrate_flow(&h0, &cfg, false), Err(Error::StepLimitExceeded { .. })));

    let mut bad = IntegratorConfig::log_spaced(1e-3, 1.0, 5);
    bad.rel_tol = 0.0;
    assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
    bad = IntegratorConfig::log_spaced(1e-3, 1.0, 5);
    bad.l_max = 0.0;
    assert!(bad.validate().is_err());
    bad = IntegratorConfig::with_grid(vec![0.0, 2.0, 1.0]);
    assert!(bad.validate().is_err());
}

#[test]
fn grids() {
    let g = log_grid(1e-2, 1e2, 5);
    assert_eq!(g.len(), 6);
    assert_eq!(g[0], 0.0);
    assert!((g[1] - 1e-2).abs() < 1e-16);
    assert!((g[3] - 1.0).abs() < 1e-14);
    assert_eq!(g[5], 1e2);
    assert_eq!(linear_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
}

fn hermitian_strategy(dim: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec(-2.0f64..2.0, dim * dim * 2).prop_map(move |v| {
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = re(v[2 * (i * dim + i)]);
            for j in i + 1..dim {
                let z = Complex64::new(v[2 * (i * dim + j)], v[2 * (i * dim + j) + 1]);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HermitianMatrix::new(m).unwrap()
    })
}

proptest! {
    #[test]
    fn generator_is_anti_hermitian(h in hermitian_strategy(4)) {
        let eta = wegner_generator(&h);
        prop_assert!(linalg::max_abs(&(eta.adjoint() + &eta)) <= 1e-12);
    }

    #[test]
    fn rhs_is_hermitian_and_cubic(h in hermitian_strategy(3), s in -3.0f64..3.0) {
        let raw = linalg::commutator(&wegner_generator(&h), h.as_matrix());
        prop_assert!(hermiticity_defect(&raw) <= 1e-12);
        let lhs = flow_rhs(&h.scale(s));
        let rhs = flow_rhs(&h).scale(s * s * s);
        let scale = 1.0 + linalg::max_abs(rhs.as_matrix());
        prop_assert!(linalg::max_abs(&(lhs.as_matrix() - rhs.as_matrix())) <= 1e-12 * scale);
    }

    #[test]
    fn offdiag_weight_never_increases_along_rhs(h in hermitian_strategy(4)) {
        // d/dl ‖H_od‖² = -2 ‖η‖² ≤ 0
        let d = flow_rhs(&h);
        let m = h.as_matrix();
        let mut deriv = 0.0;
        for i in 0..4 { for j in 0..4 { if i != j {
            deriv += 2.0 * (m[(i, j)].conj() * d[(i, j)]).re;
        }}}
        prop_assert!(deriv <= 1e-12);
    }
}
