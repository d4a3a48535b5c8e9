use super::*;
use crate::channels;
use crate::linalg::max_abs_diff;
use crate::verify::rng::{random_hermitian, random_unit_vector, rng};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

fn pauli_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m.set(0, 1, C64::new(0.0, -1.0));
    m.set(1, 0, C64::new(0.0, 1.0));
    m
}

fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

fn qubit_h(omega: f64) -> HermitianOperator {
    HermitianOperator::new(pauli_z().scale(re(omega / 2.0))).unwrap()
}

/// |ψ(t0)⟩ = e^{−iHt0}|+⟩ for H = ωZ/2.
fn evolved_plus(omega: f64, t0: f64) -> Vec<C64> {
    let h = qubit_h(omega);
    let u = evolution_unitary(&h, t0);
    let s = 1.0 / 2f64.sqrt();
    u.matvec(&[re(s), re(s)])
}

fn qubit_scenario(omega: f64, t0: f64, channel: channels::KrausChannel) -> MetrologyScenario {
    MetrologyScenario::new(evolved_plus(omega, t0), qubit_h(omega), channel, t0, "qubit").unwrap()
}

fn ghz_state(n: usize) -> Vec<C64> {
    let dim = 1usize << n;
    let mut psi = vec![re(0.0); dim];
    let s = 1.0 / 2f64.sqrt();
    psi[0] = re(s);
    psi[dim - 1] = re(s);
    psi
}

/// H = Σ_i (ω/2) Z_i as a diagonal operator on n qubits.
fn onsite_z_hamiltonian(n: usize, omega: f64) -> HermitianOperator {
    let dim = 1usize << n;
    HermitianOperator::from_fn(dim, |i, j| {
        if i != j {
            return re(0.0);
        }
        let downs = (i as u64).count_ones() as f64;
        re(omega / 2.0 * (n as f64 - 2.0 * downs))
    })
    .unwrap()
}

/// Four-qubit code state [|0000⟩ + |1111⟩ + |0110⟩ + |1001⟩]/2 and the
/// square-pattern Ising Hamiltonian ω(Z1Z2 + Z1Z3 + Z2Z4 + Z3Z4).
fn code422_state() -> Vec<C64> {
    let mut psi = vec![re(0.0); 16];
    psi[0b0000] = re(0.5);
    psi[0b1111] = re(0.5);
    psi[0b0110] = re(0.5);
    psi[0b1001] = re(0.5);
    psi
}

fn code422_hamiltonian(omega: f64) -> HermitianOperator {
    // Qubit 0 is the most significant bit.
    let edges = [(0usize, 1usize), (0, 2), (1, 3), (2, 3)];
    HermitianOperator::from_fn(16, |i, j| {
        if i != j {
            return re(0.0);
        }
        let z = |q: usize| -> f64 {
            if (i >> (3 - q)) & 1 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        re(omega * edges.iter().map(|&(a, b)| z(a) * z(b)).sum::<f64>())
    })
    .unwrap()
}

#[test]
fn xi_vector_qubit_example() {
    // ψ = |+⟩, H = ωZ/2 → ξ = (ω/2)|−⟩.
    let omega = 1.7;
    let s = 1.0 / 2f64.sqrt();
    let psi = vec![re(s), re(s)];
    let xi = xi_vector(&psi, &qubit_h(omega)).unwrap();
    assert!((xi[0] - re(omega / 2.0 * s)).norm() < 1e-12);
    assert!((xi[1] - re(-omega / 2.0 * s)).norm() < 1e-12);
    assert!((vec_norm(&xi) - omega / 2.0).abs() < 1e-12);
}

#[test]
fn xi_vector_ghz_example() {
    // GHZ with on-site fields: ξ = (nω/2)·(|↑…↑⟩ − |↓…↓⟩)/√2.
    let (n, omega) = (4usize, 0.9);
    let psi = ghz_state(n);
    let h = onsite_z_hamiltonian(n, omega);
    let xi = xi_vector(&psi, &h).unwrap();
    let s = 1.0 / 2f64.sqrt();
    let amp = n as f64 * omega / 2.0 * s;
    assert!((xi[0] - re(amp)).norm() < 1e-12);
    assert!((xi[(1 << n) - 1] - re(-amp)).norm() < 1e-12);
    for k in 1..(1 << n) - 1 {
        assert!(xi[k].norm() < 1e-13);
    }
}

#[test]
fn xi_vector_stationary_probe() {
    let psi = vec![re(1.0), re(0.0)];
    let h = HermitianOperator::new(ComplexMatrix::identity(2).scale(re(2.5))).unwrap();
    assert!(matches!(
        xi_vector(&psi, &h),
        Err(ClockError::StationaryProbe)
    ));
}

#[test]
fn optimal_time_observable_qubit_closed_form() {
    let omega = 1.3;
    for &t0 in &[0.0, 0.4, 1.9] {
        let sc = qubit_scenario(omega, t0, channels::identity(2));
        let t = optimal_time_observable(&sc, None).unwrap();
        // T − t0 = (1/ω)[cos(ωt0) Y − sin(ωt0) X]
        let expected = pauli_y()
            .scale(re((omega * t0).cos() / omega))
            .sub(&pauli_x().scale(re((omega * t0).sin() / omega)))
            .add(&ComplexMatrix::identity(2).scale(re(t0)));
        assert!(max_abs_diff(t.matrix(), &expected) < 1e-10);
    }
}

#[test]
fn optimal_time_observable_saturates_cramer_rao() {
    let mut r = rng(201);
    let psi = random_unit_vector(&mut r, 5);
    let h = random_hermitian(&mut r, 5, 1.0);
    let sc = MetrologyScenario::new(psi.clone(), h.clone(), channels::identity(5), 0.3, "rand")
        .unwrap();
    let t = optimal_time_observable(&sc, None).unwrap();
    // ⟨T⟩ = t0 and tr(T ∂_tψ) = 1.
    assert!((t.expectation(&psi) - 0.3).abs() < 1e-9);
    let vq = VirtualQubit::from_probe(&psi, &h).unwrap();
    let pairing = t.matrix().matmul(&vq.time_direction()).trace().re;
    assert!((pairing - 1.0).abs() < 1e-9);
    // Variance equals 1/(4σ_H²) = 1/F_Alice(t).
    let shifted = t.shift(-0.3);
    let var = shifted.matrix().matmul(shifted.matrix()).expectation(&psi).re;
    let sigma2 = sc.energy_variance();
    assert!((var - 1.0 / (4.0 * sigma2)).abs() < 1e-9 * var.max(1.0));
}

#[test]
fn optimal_time_observable_gauge_freedom() {
    let mut r = rng(203);
    let psi = random_unit_vector(&mut r, 4);
    let h = random_hermitian(&mut r, 4, 1.0);
    let sc =
        MetrologyScenario::new(psi.clone(), h.clone(), channels::identity(4), 0.0, "g").unwrap();
    let gauge = random_hermitian(&mut r, 4, 2.0);
    let t0 = optimal_time_observable(&sc, None).unwrap();
    let t1 = optimal_time_observable(&sc, Some(&gauge)).unwrap();
    // Gauge shifts act only outside the support: ⟨T⟩ and tr(T ∂ψ) unchanged.
    assert!((t0.expectation(&psi) - t1.expectation(&psi)).abs() < 1e-10);
    let vq = VirtualQubit::from_probe(&psi, &h).unwrap();
    let d = vq.time_direction();
    let p0 = t0.matrix().matmul(&d).trace().re;
    let p1 = t1.matrix().matmul(&d).trace().re;
    assert!((p0 - p1).abs() < 1e-9);
}

#[test]
fn eta_direction_qubit_closed_form() {
    let omega = 2.1;
    for &t0 in &[0.0, 0.8] {
        let sc = qubit_scenario(omega, t0, channels::identity(2));
        let eta = eta_direction(&sc).unwrap();
        // ∂_ηψ = Z/ω at every reference time.
        assert!(max_abs_diff(eta.matrix(), &pauli_z().scale(re(1.0 / omega))) < 1e-10);
        assert!(eta.matrix().trace().norm() < 1e-12);
        // d⟨H⟩/dη = tr(H ∂_ηψ) = 1.
        let pairing = sc.h.matrix().matmul(eta.matrix()).trace().re;
        assert!((pairing - 1.0).abs() < 1e-10);
    }
}

#[test]
fn eta_optimal_observable_is_the_hamiltonian() {
    // R' = (H − ⟨H⟩)/σ² solves ½{ψ, R'} = ∂_ηψ, so the optimal η-estimator
    // is H itself up to gauge.
    let mut r = rng(205);
    let psi = random_unit_vector(&mut r, 4);
    let h = random_hermitian(&mut r, 4, 1.0);
    let sc = MetrologyScenario::new(psi.clone(), h.clone(), channels::identity(4), 0.0, "η")
        .unwrap();
    let eta = eta_direction(&sc).unwrap();
    let sigma2 = sc.energy_variance();
    let hbar = h.shift(-sc.mean_energy());
    let rprime = hbar.scale(1.0 / sigma2);
    let proj = ComplexMatrix::outer(&psi, &psi);
    let anti = proj
        .matmul(rprime.matrix())
        .add(&rprime.matrix().matmul(&proj))
        .scale(re(0.5));
    assert!(max_abs_diff(&anti, eta.matrix()) < 1e-9);
}

#[test]
fn fisher_report_partial_dephasing_ratios() {
    let omega = 2.0;
    for &p in &[0.0, 0.3, 0.55, 1.0] {
        let sc = qubit_scenario(omega, 0.7, channels::partial_dephasing_z(p).unwrap());
        let rep = fisher_report(&sc).unwrap();
        assert!((rep.f_alice_t - omega * omega).abs() < 1e-10);
        assert!((rep.f_alice_eta - 4.0 / (omega * omega)).abs() < 1e-10);
        let bob_ratio = rep.f_bob_t / rep.f_alice_t;
        let eve_ratio = rep.f_eve_eta / rep.f_alice_eta;
        assert!(
            (bob_ratio - (1.0 - p) * (1.0 - p)).abs() < 1e-9,
            "p={p}: bob ratio {bob_ratio}"
        );
        assert!(
            (eve_ratio - (2.0 * p - p * p)).abs() < 1e-9,
            "p={p}: eve ratio {eve_ratio}"
        );
        assert!((rep.sum_ratio - 1.0).abs() < 1e-9);
        // Loss computed on Eve's side agrees with Bob's deficit.
        assert!((rep.delta_f - rep.delta_f_eve_side).abs() < 1e-7 * rep.f_alice_t.max(1.0));
    }
}

#[test]
fn fisher_report_transversal_dephasing() {
    let omega = 1.0;
    // Away from multiples of π/ω: no sensitivity loss at all.
    for &t0 in &[0.3, 1.0, 2.0] {
        let sc = qubit_scenario(omega, t0, channels::complete_dephasing_x());
        let rep = fisher_report(&sc).unwrap();
        assert!(rep.delta_f.abs() < 1e-9, "t0={t0}: ΔF = {}", rep.delta_f);
        assert!((rep.f_bob_t - omega * omega).abs() < 1e-8);
        assert!(rep.equality_holds, "{}", rep.rank_diag);
    }
    // At ωt0 = π the output state changes rank: equality fails and Bob's
    // first-order sensitivity collapses.
    let sc = qubit_scenario(omega, std::f64::consts::PI, channels::complete_dephasing_x());
    let rep = fisher_report(&sc).unwrap();
    assert!(!rep.equality_holds, "{}", rep.rank_diag);
    assert!(rep.f_bob_t < 1e-9);
}

#[test]
fn fisher_report_ghz_erasure_loss() {
    let omega = 1.1;
    for &n in &[3usize, 4] {
        for &p in &[0.25, 0.8] {
            let psi = ghz_state(n);
            let h = onsite_z_hamiltonian(n, omega);
            let ch = channels::located_erasure(0, p, n).unwrap();
            let sc = MetrologyScenario::new(psi, h, ch, 0.0, "ghz-erasure").unwrap();
            let rep = fisher_report(&sc).unwrap();
            let expected = p * (n as f64 * omega).powi(2);
            assert!(
                (rep.delta_f - expected).abs() < 1e-7 * expected.max(1.0),
                "n={n} p={p}: ΔF {} vs {expected}",
                rep.delta_f
            );
            assert!((rep.sum_ratio - 1.0).abs() < 1e-8, "{}", rep.rank_diag);
        }
    }
}

#[test]
fn fisher_report_invariant_under_energy_shift() {
    let mut r = rng(207);
    let psi = random_unit_vector(&mut r, 3);
    let h = random_hermitian(&mut r, 3, 1.0);
    let ch = channels::partial_dephasing_z(0.4).unwrap();
    // Channel acts on qubits only; use a qutrit-safe channel instead.
    let _ = ch;
    let kraus = vec![
        ComplexMatrix::identity(3).scale(re(0.8f64.sqrt())),
        ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                re(0.2f64.sqrt()) * re(if i == 0 { 1.0 } else { -1.0 })
            } else {
                re(0.0)
            }
        }),
    ];
    let ch3 = channels::KrausChannel::new(kraus).unwrap();
    let sc1 = MetrologyScenario::new(psi.clone(), h.clone(), ch3.clone(), 0.0, "a").unwrap();
    let shifted = h.shift(3.7);
    let sc2 = MetrologyScenario::new(psi, shifted, ch3, 0.0, "b").unwrap();
    let r1 = fisher_report(&sc1).unwrap();
    let r2 = fisher_report(&sc2).unwrap();
    assert!((r1.f_bob_t - r2.f_bob_t).abs() < 1e-10 * r1.f_bob_t.max(1.0));
    assert!((r1.f_eve_eta - r2.f_eve_eta).abs() < 1e-10 * r1.f_eve_eta.max(1.0));
    assert!((r1.sum_ratio - r2.sum_ratio).abs() < 1e-10);
}

#[test]
fn equality_conditions_examples() {
    // Identity channel: Eve's state is constant, conditions hold.
    let sc = qubit_scenario(1.0, 0.5, channels::identity(2));
    let eq = equality_conditions(&sc).unwrap();
    assert!(eq.holds, "{}", eq.diagnostics);

    // Full-rank Bob state (partial dephasing, 0 < p < 1): holds.
    let sc = qubit_scenario(1.0, 0.5, channels::partial_dephasing_z(0.5).unwrap());
    let eq = equality_conditions(&sc).unwrap();
    assert!(eq.holds, "{}", eq.diagnostics);
    assert!(eq.null_combination_residual < 1e-9);

    // Complete X dephasing at ωt0 = π: rank change, conditions fail.
    let sc = qubit_scenario(1.0, std::f64::consts::PI, channels::complete_dephasing_x());
    let eq = equality_conditions(&sc).unwrap();
    assert!(!eq.holds, "{}", eq.diagnostics);
}

#[test]
fn sum_ratio_never_exceeds_one_for_random_scenarios() {
    let mut r = rng(209);
    for trial in 0..40 {
        let d = 2 + trial % 3;
        let psi = random_unit_vector(&mut r, d);
        let h = random_hermitian(&mut r, d, 1.0);
        // Random trace-preserving channel.
        let raw: Vec<ComplexMatrix> = (0..2)
            .map(|_| crate::verify::rng::random_matrix(&mut r, d, d))
            .collect();
        let mut sum = ComplexMatrix::zeros(d, d);
        for e in &raw {
            sum = sum.add(&e.dagger().matmul(e));
        }
        let spec = eig_hermitian(&HermitianOperator::new(sum).unwrap()).unwrap();
        let inv_sqrt = spec.map_eigenvalues(|l| if l > 0.0 { 1.0 / l.sqrt() } else { 0.0 });
        let kraus: Vec<ComplexMatrix> = raw.iter().map(|e| e.matmul(&inv_sqrt)).collect();
        let ch = channels::KrausChannel::new(kraus).unwrap();
        let sc = match MetrologyScenario::new(psi, h, ch, 0.0, "rand") {
            Ok(s) => s,
            Err(ClockError::StationaryProbe) => continue,
            Err(e) => panic!("{e}"),
        };
        let rep = match fisher_report(&sc) {
            Ok(rep) => rep,
            Err(ClockError::StationaryProbe) => continue,
            Err(e) => panic!("{e}"),
        };
        assert!(rep.sum_ratio <= 1.0 + 1e-8, "sum ratio {}", rep.sum_ratio);
        if rep.equality_holds {
            assert!(
                (rep.sum_ratio - 1.0).abs() < 1e-8,
                "equality case drifted: {} ({})",
                rep.sum_ratio,
                rep.rank_diag
            );
        }
    }
}

#[test]
fn two_parameter_bound_time_energy_pair_has_unit_rhs() {
    let omega = 1.4;
    let t0 = 0.6;
    let sc = qubit_scenario(omega, t0, channels::partial_dephasing_z(0.3).unwrap());
    let t_obs = optimal_time_observable(&sc, None).unwrap();
    let minus_t = t_obs.scale(-1.0);
    let (lhs, rhs) =
        two_parameter_bound(&sc.psi, &sc.h, &minus_t, &sc.channel).unwrap();
    assert!((rhs - 1.0).abs() < 1e-9, "rhs {rhs}");
    assert!(lhs <= rhs + 1e-8);
}

#[test]
fn two_parameter_bound_commuting_pair_has_rhs_three() {
    // A and B act on different qubits of a two-qubit probe.
    let s = 0.5f64;
    let psi = vec![re(s), re(s), re(s), re(s)]; // |+⟩⊗|+⟩
    let a = HermitianOperator::new(pauli_z().kron(&ComplexMatrix::identity(2))).unwrap();
    let b = HermitianOperator::new(ComplexMatrix::identity(2).kron(&pauli_z())).unwrap();
    let ch = channels::identity(4);
    let (lhs, rhs) = two_parameter_bound(&psi, &a, &b, &ch).unwrap();
    assert!((rhs - 3.0).abs() < 1e-9);
    assert!(lhs <= rhs + 1e-8);
}

#[test]
fn two_parameter_bound_random_instances() {
    let mut r = rng(211);
    for _ in 0..25 {
        let psi = random_unit_vector(&mut r, 2);
        let a = random_hermitian(&mut r, 2, 1.0);
        let b = random_hermitian(&mut r, 2, 1.0);
        let ch = channels::identity(2);
        match two_parameter_bound(&psi, &a, &b, &ch) {
            Ok((lhs, rhs)) => assert!(lhs <= rhs + 1e-8, "{lhs} vs {rhs}"),
            Err(ClockError::StationaryProbe) => continue,
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn signal_generator_commuting_case_collapses() {
    // [H_f, G] = 0 → K_f = T·G.
    let h0 = qubit_h(0.9);
    let g = HermitianOperator::new(pauli_z().scale(re(0.4))).unwrap();
    let (k, residual) = signal_generator(&h0, &g, 0.2, 1.7, 6).unwrap();
    assert!(max_abs_diff(k.matrix(), &g.matrix().scale(re(1.7))) < 1e-12);
    assert!(residual < 1e-12);
}

#[test]
fn signal_generator_matches_unitary_finite_difference() {
    // K_f = −i U_f† dU_f/df against central differences of U_f.
    let omega = 1.0;
    let h0 = qubit_h(omega);
    let g = HermitianOperator::new(pauli_x()).unwrap();
    let f0 = 0.3;
    let big_t = 0.4;
    let (k, _) = signal_generator(&h0, &g, f0, big_t, 24).unwrap();
    let u = |f: f64| -> ComplexMatrix {
        let hf = h0.add(&g.scale(f));
        expm(&hf.matrix().scale(C64::new(0.0, -big_t))).unwrap()
    };
    let df = 1e-4;
    let du = u(f0 + df).sub(&u(f0 - df)).scale(re(1.0 / (2.0 * df)));
    // The generator of the f-evolution of states: K = i·(dU/df)·U†, so that
    // ∂_f ψ_f = −i[K, ψ_f].
    let k_fd = du.matmul(&u(f0).dagger()).scale(C64::new(0.0, 1.0));
    assert!(
        max_abs_diff(k.matrix(), &k_fd) < 1e-6,
        "{}",
        max_abs_diff(k.matrix(), &k_fd)
    );
}

#[test]
fn signal_generator_tail_estimate_controls_truncation() {
    let h0 = qubit_h(1.3);
    let g = HermitianOperator::new(pauli_x()).unwrap();
    let (k8, tail8) = signal_generator(&h0, &g, 0.1, 0.5, 8).unwrap();
    let (k9, _) = signal_generator(&h0, &g, 0.1, 0.5, 9).unwrap();
    let change = k9.matrix().sub(k8.matrix());
    assert!(op_norm(&change) <= tail8 * (1.0 + 1e-9) + 1e-15);
}

#[test]
fn explicit_sld_identity_channel_is_twice_derivative() {
    let sc = qubit_scenario(1.0, 0.4, channels::identity(2));
    let r_b = explicit_bob_sld(&sc).unwrap();
    let vq = VirtualQubit::from_probe(&sc.psi, &sc.h).unwrap();
    let expected = vq.time_direction().scale(re(2.0));
    // Compare on the support of ρ_B (gauge freedom lives in the kernel).
    let proj = ComplexMatrix::outer(&sc.psi, &sc.psi);
    let rho = sc.channel.apply(&proj);
    let spec = eig_hermitian(&HermitianOperator::new(rho).unwrap()).unwrap();
    let p = spec.support_projector();
    let diff = r_b.matrix().sub(&expected);
    let kernel_free = diff.sub(
        &spec
            .kernel_projector()
            .matmul(&diff)
            .matmul(&spec.kernel_projector()),
    );
    assert!(kernel_free.max_abs() < 1e-9, "{}", kernel_free.max_abs());
    let _ = p;
}

#[test]
fn explicit_sld_matches_canonical_for_transversal_dephasing() {
    let sc = qubit_scenario(1.0, 0.9, channels::complete_dephasing_x());
    let r_formula = explicit_bob_sld(&sc).unwrap();
    let r_canon = bob_sld_canonical(&sc).unwrap();
    // Any two SLD solutions differ by a kernel-supported gauge term.
    let proj = ComplexMatrix::outer(&sc.psi, &sc.psi);
    let rho = sc.channel.apply(&proj);
    let spec = eig_hermitian(&HermitianOperator::new(rho).unwrap()).unwrap();
    let pk = spec.kernel_projector();
    let diff = r_formula.matrix().sub(r_canon.matrix());
    let gauge_only = diff.sub(&pk.matmul(&diff).matmul(&pk));
    assert!(gauge_only.max_abs() < 1e-8, "{}", gauge_only.max_abs());
    // And its Fisher value matches the report.
    let f_direct = fisher_value_of_sld(&sc, &r_formula).unwrap();
    let rep = fisher_report(&sc).unwrap();
    assert!((f_direct - rep.f_bob_t).abs() < 1e-7 * rep.f_bob_t.max(1.0));
}

#[test]
fn explicit_sld_recovers_full_sensitivity_for_code_state() {
    // Four-qubit code state with a located erasure: σ_H² = 16ω² and the
    // explicit SLD witnesses tr(ρR²) = 4σ_H² = 64ω².
    let omega = 0.8;
    let psi = code422_state();
    let h = code422_hamiltonian(omega);
    let sigma2 = {
        let h2 = h.matrix().matmul(h.matrix());
        h2.expectation(&psi).re - h.expectation(&psi).powi(2)
    };
    assert!((sigma2 - 16.0 * omega * omega).abs() < 1e-10);
    let ch = channels::located_erasure(1, 0.6, 4).unwrap();
    let sc = MetrologyScenario::new(psi, h, ch, 0.0, "code").unwrap();
    let r_b = explicit_bob_sld(&sc).unwrap();
    let f = fisher_value_of_sld(&sc, &r_b).unwrap();
    assert!(
        (f - 4.0 * sigma2).abs() < 1e-7 * (4.0 * sigma2),
        "tr(ρR²) = {f} vs 4σ² = {}",
        4.0 * sigma2
    );
}

#[test]
fn explicit_sld_requires_zero_loss() {
    // GHZ under a single-site dephasing violates the code conditions.
    let n = 3;
    let psi = ghz_state(n);
    let h = onsite_z_hamiltonian(n, 1.0);
    let deph = channels::partial_dephasing_z(0.5).unwrap();
    let site = deph
        .tensor_power(1)
        .unwrap()
        .channel
        .kraus()
        .iter()
        .map(|e| e.kron(&ComplexMatrix::identity(1 << (n - 1))))
        .collect::<Vec<_>>();
    let ch = channels::KrausChannel::new(site).unwrap();
    let sc = MetrologyScenario::new(psi, h, ch, 0.0, "ghz-deph").unwrap();
    assert!(matches!(
        explicit_bob_sld(&sc),
        Err(ClockError::ZeroLossViolated { .. })
    ));
}

#[test]
fn virtual_qubit_structure() {
    let mut r = rng(213);
    let psi = random_unit_vector(&mut r, 4);
    let h = random_hermitian(&mut r, 4, 1.0);
    let vq = VirtualQubit::from_probe(&psi, &h).unwrap();
    assert!(vec_inner(&vq.plus, &vq.minus).norm() < 1e-10);
    assert!((vec_norm(&vq.minus) - 1.0).abs() < 1e-12);
    // σ_H matches the probe's energy spread.
    let sc = MetrologyScenario::new(psi.clone(), h.clone(), channels::identity(4), 0.0, "vq")
        .unwrap();
    assert!((vq.sigma_h * vq.sigma_h - sc.energy_variance()).abs() < 1e-10);
    // Y_L and Z_L anticommute on the logical subspace and X_L² = Π_L.
    let y = vq.y_l();
    let z = vq.z_l();
    let anti = y.matmul(&z).add(&z.matmul(&y));
    assert!(anti.max_abs() < 1e-10);
    let x2 = vq.x_l().matmul(&vq.x_l());
    assert!(max_abs_diff(&x2, &vq.projector()) < 1e-10);
    // Time direction is −i[H̄, ψ].
    let proj = ComplexMatrix::outer(&psi, &psi);
    let hbar = h.shift(-sc.mean_energy());
    let commutator = hbar
        .matrix()
        .matmul(&proj)
        .sub(&proj.matmul(hbar.matrix()))
        .scale(C64::new(0.0, -1.0));
    assert!(max_abs_diff(&vq.time_direction(), &commutator) < 1e-10);
}
