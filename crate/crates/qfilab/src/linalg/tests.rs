use super::matrix::{inner, norm};
use super::*;
use crate::verify::rng::{random_hermitian, random_matrix, random_unit_vector, rng};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn eig_identity_and_diagonal() {
    let id = HermitianOperator::identity(2);
    let spec = eig_hermitian(&id).unwrap();
    assert!((spec.eigenvalues()[0] - 1.0).abs() < 1e-14);
    assert!((spec.eigenvalues()[1] - 1.0).abs() < 1e-14);

    let d = HermitianOperator::new(ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, 1.0]]))
        .unwrap();
    let spec = eig_hermitian(&d).unwrap();
    assert_eq!(spec.eigenvalues(), &[3.0, 1.0]);
    // Eigenvectors are e1, e2 up to phase.
    assert!((spec.eigenvector(0)[0].norm() - 1.0).abs() < 1e-14);
    assert!((spec.eigenvector(1)[1].norm() - 1.0).abs() < 1e-14);
}

#[test]
fn eig_reconstruction_random() {
    let mut r = rng(7);
    for &d in &[2usize, 3, 6, 17, 64] {
        let a = random_hermitian(&mut r, d, 1.0);
        let spec = eig_hermitian(&a).unwrap();
        let resid = max_abs_diff(&spec.reconstruct(), a.matrix());
        assert!(
            resid < 1e-10 * a.matrix().max_abs().max(1.0),
            "reconstruction residual {resid:.3e} at d={d}"
        );
        // Orthonormality ‖U†U − I‖ ≤ 1e-10.
        let u = spec.eigenvectors();
        let gram = u.dagger().matmul(u);
        assert!(max_abs_diff(&gram, &ComplexMatrix::identity(d)) < 1e-10);
        // Descending order.
        for w in spec.eigenvalues().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }
}

#[test]
fn partial_trace_product_state() {
    let mut r = rng(11);
    let rho = random_hermitian(&mut r, 2, 1.0);
    let sigma = random_hermitian(&mut r, 3, 1.0);
    let joint = rho.matrix().kron(sigma.matrix());
    let reduced = partial_trace(&joint, &[0], &[2, 3]).unwrap();
    let expected = rho.matrix().scale(sigma.matrix().trace());
    assert!(max_abs_diff(&reduced, &expected) < 1e-12);
    // Trace preserved overall.
    let full = partial_trace(&joint, &[0, 1], &[2, 3]).unwrap();
    assert!(max_abs_diff(&full, &joint) < 1e-14);
}

#[test]
fn partial_trace_ghz_site_is_maximally_mixed() {
    // (|000⟩ + |111⟩)/√2, keep the first qubit.
    let mut psi = vec![C64::new(0.0, 0.0); 8];
    psi[0] = re(1.0 / 2f64.sqrt());
    psi[7] = re(1.0 / 2f64.sqrt());
    let proj = ComplexMatrix::outer(&psi, &psi);
    let reduced = partial_trace(&proj, &[0], &[2, 2, 2]).unwrap();
    let half = ComplexMatrix::identity(2).scale(re(0.5));
    assert!(max_abs_diff(&reduced, &half) < 1e-14);
}

#[test]
fn partial_trace_matches_index_sum_oracle() {
    // Independent oracle: explicit index sums on a random two-qubit operator.
    let mut r = rng(13);
    let a = random_matrix(&mut r, 4, 4);
    let reduced = partial_trace(&a, &[0], &[2, 2]).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let expected = a.get(2 * i, 2 * j) + a.get(2 * i + 1, 2 * j + 1);
            assert!((reduced.get(i, j) - expected).norm() < 1e-13);
        }
    }
    // Keeping the second factor instead.
    let reduced2 = partial_trace(&a, &[1], &[2, 2]).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let expected = a.get(i, j) + a.get(2 + i, 2 + j);
            assert!((reduced2.get(i, j) - expected).norm() < 1e-13);
        }
    }
}

#[test]
fn partial_trace_is_positive() {
    let mut r = rng(17);
    for _ in 0..20 {
        let g = random_matrix(&mut r, 8, 8);
        let psd = g.matmul(&g.dagger());
        let reduced = partial_trace(&psd, &[1], &[2, 2, 2]).unwrap();
        let herm = HermitianOperator::new(reduced).unwrap();
        let spec = eig_hermitian(&herm).unwrap();
        assert!(spec.eigenvalues().last().unwrap() > &-1e-10);
    }
}

#[test]
fn partial_trace_rejects_bad_input() {
    let a = ComplexMatrix::identity(4);
    assert!(partial_trace(&a, &[2], &[2, 2]).is_err());
    assert!(partial_trace(&a, &[0], &[2, 3]).is_err());
}

#[test]
fn vectorize_examples() {
    let id = ComplexMatrix::identity(2);
    let v = vectorize(&id);
    assert_eq!(v, vec![re(1.0), re(0.0), re(0.0), re(1.0)]);

    let mut unit = ComplexMatrix::zeros(2, 2);
    unit.set(0, 1, re(1.0));
    assert_eq!(vectorize(&unit), vec![re(0.0), re(1.0), re(0.0), re(0.0)]);

    let mut r = rng(19);
    let a = random_matrix(&mut r, 3, 3);
    let round = devectorize(&vectorize(&a), 3).unwrap();
    assert_eq!(a, round);
}

#[test]
fn vectorization_identity() {
    // (X ⊗ I)|1⟩⟩ = (I ⊗ Xᵀ)|1⟩⟩ entry-exact.
    let mut r = rng(23);
    let d = 4;
    let x = random_matrix(&mut r, d, d);
    let id = ComplexMatrix::identity(d);
    let one: Vec<C64> = {
        let mut v = vec![C64::new(0.0, 0.0); d * d];
        for k in 0..d {
            v[k * d + k] = re(1.0);
        }
        v
    };
    let lhs = x.kron(&id).matvec(&one);
    let rhs = id.kron(&x.transpose()).matvec(&one);
    assert_eq!(lhs, rhs);
    assert_eq!(lhs, vectorize(&x));
}

#[test]
fn psd_block_trivial_and_rank_one() {
    let id = ComplexMatrix::identity(2);
    let zero = ComplexMatrix::zeros(2, 2);
    let rep = psd_block_check(&id, &zero, &id).unwrap();
    assert!(rep.positive);
    assert_eq!(rep.w_kills_b_kernel, Some(true));

    // [[ψ, ψH̄], [H̄ψ, H̄ψH̄]] = (|ψ⟩, H̄|ψ⟩)(⟨ψ|, ⟨ψ|H̄) ⪰ 0 for any pure ψ.
    let mut r = rng(29);
    let psi = random_unit_vector(&mut r, 3);
    let h = random_hermitian(&mut r, 3, 1.0);
    let mean = h.expectation(&psi);
    let hbar = h.shift(-mean);
    let proj = ComplexMatrix::outer(&psi, &psi);
    let a = proj.clone();
    let w = proj.matmul(hbar.matrix());
    let b = hbar.matrix().matmul(&proj).matmul(hbar.matrix());
    let rep = psd_block_check(&a, &w, &b).unwrap();
    assert!(rep.positive, "min eigenvalue {}", rep.min_eigenvalue);
    assert_eq!(rep.w_kills_b_kernel, Some(true));
}

#[test]
fn psd_block_detects_schur_failure() {
    // A = diag(1, 0) cannot dominate a coupling out of its support.
    let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let w = ComplexMatrix::from_real_rows(&[&[0.0, 0.7], &[0.7, 0.0]]);
    let b = ComplexMatrix::identity(2);
    let rep = psd_block_check(&a, &w, &b).unwrap();
    assert!(!rep.positive);
}

#[test]
fn psd_block_agrees_with_direct_min_eigenvalue() {
    let mut r = rng(31);
    for _ in 0..200 {
        let a0 = random_hermitian(&mut r, 3, 1.0);
        let b0 = random_hermitian(&mut r, 2, 1.0);
        let w = random_matrix(&mut r, 3, 2).scale(re(0.5));
        // Mix of positive and indefinite blocks.
        let a = a0.matrix().matmul(a0.matrix());
        let b = b0.matrix().matmul(b0.matrix());
        let rep = psd_block_check(&a, &w, &b).unwrap();
        // Direct oracle: eigenvalues of the assembled block matrix.
        let block = ComplexMatrix::from_fn(5, 5, |i, j| match (i < 3, j < 3) {
            (true, true) => a.get(i, j),
            (true, false) => w.get(i, j - 3),
            (false, true) => w.get(j, i - 3).conj(),
            (false, false) => b.get(i - 3, j - 3),
        });
        let spec = eig_hermitian(&HermitianOperator::new(block).unwrap()).unwrap();
        let min = *spec.eigenvalues().last().unwrap();
        let scale = spec.eigenvalues()[0].abs().max(1.0);
        assert_eq!(rep.positive, min >= -1e-10 * scale);
        assert!((rep.min_eigenvalue - min).abs() < 1e-10 * scale);
    }
}

#[test]
fn expm_examples() {
    let zero = ComplexMatrix::zeros(3, 3);
    assert!(max_abs_diff(&expm(&zero).unwrap(), &ComplexMatrix::identity(3)) < 1e-14);

    let d = ComplexMatrix::from_real_rows(&[&[0.3, 0.0], &[0.0, -1.2]]);
    let e = expm(&d).unwrap();
    assert!((e.get(0, 0).re - 0.3f64.exp()).abs() < 1e-12);
    assert!((e.get(1, 1).re - (-1.2f64).exp()).abs() < 1e-12);
    assert!(e.get(0, 1).norm() < 1e-14);
}

#[test]
fn expm_matches_squaring_refinement() {
    // Oracle: e^A = (e^{A/2^k})^{2^k} evaluated at a different scaling depth.
    let mut r = rng(37);
    let a = random_matrix(&mut r, 5, 5).scale(re(0.8));
    let direct = expm(&a).unwrap();
    let mut refined = expm(&a.scale(re(1.0 / 16.0))).unwrap();
    for _ in 0..4 {
        refined = refined.matmul(&refined);
    }
    assert!(max_abs_diff(&direct, &refined) < 1e-10);
}

#[test]
fn expm_rejects_overflow() {
    let huge = ComplexMatrix::identity(2).scale(re(1e13));
    assert!(matches!(
        expm(&huge),
        Err(LinalgError::ExpmOverflow { .. })
    ));
}

#[test]
fn pinv_rank_deficient() {
    let d = ComplexMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.0]]);
    let p = pinv_psd(&d).unwrap();
    assert!((p.get(0, 0).re - 0.5).abs() < 1e-14);
    assert!(p.get(1, 1).norm() < 1e-14);
}

#[test]
fn norms_against_known_values() {
    let a = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, -4.0]]);
    assert!((trace_norm(&a) - 7.0).abs() < 1e-10);
    assert!((op_norm(&a) - 4.0).abs() < 1e-10);
}

#[test]
fn ldlt_factorizes_psd() {
    let mut r = rng(41);
    let g = random_matrix(&mut r, 4, 4);
    let rho = g.matmul(&g.dagger());
    let (l, d) = ldlt_psd(&rho, 0.0).unwrap();
    let mut ld = l.clone();
    for i in 0..4 {
        for j in 0..4 {
            ld.set(i, j, ld.get(i, j) * d[j]);
        }
    }
    let back = ld.matmul(&l.dagger());
    assert!(max_abs_diff(&back, &rho) < 1e-10 * rho.max_abs().max(1.0));
    let linv = super::ops::invert_unit_lower(&l);
    assert!(max_abs_diff(&linv.matmul(&l), &ComplexMatrix::identity(4)) < 1e-10);
}

#[test]
fn superoperator_sandwich_agrees_with_direct_action() {
    let mut r = rng(43);
    let d = 3;
    let l = random_matrix(&mut r, d, d);
    let rr = random_matrix(&mut r, d, d);
    let s = Superoperator::sandwich(&l, &rr);
    for c in 0..d * d {
        let (i, j) = (c / d, c % d);
        let mut unit = ComplexMatrix::zeros(d, d);
        unit.set(i, j, re(1.0));
        let direct = l.matmul(&unit).matmul(&rr);
        assert!(max_abs_diff(&s.apply(&unit), &direct) < 1e-12);
    }
}

#[test]
fn hermitian_constructor_rejects_asymmetry() {
    let mut m = ComplexMatrix::identity(2);
    m.set(0, 1, re(0.5));
    assert!(HermitianOperator::new(m).is_err());
}

#[test]
fn density_constructor_enforces_positivity_and_trace() {
    let neg = HermitianOperator::new(ComplexMatrix::from_real_rows(&[
        &[0.5, 0.0],
        &[0.0, -0.5],
    ]))
    .unwrap();
    assert!(DensityOperator::new(neg).is_err());

    let over = HermitianOperator::new(ComplexMatrix::identity(2)).unwrap();
    assert!(DensityOperator::new(over).is_err()); // trace 2

    let mut psi = vec![re(0.6), re(0.8)];
    let n = norm(&psi);
    psi.iter_mut().for_each(|z| *z /= n);
    let rho = DensityOperator::pure(&psi).unwrap();
    assert!((rho.trace() - 1.0).abs() < 1e-12);
}

#[test]
fn inner_product_convention() {
    let u = vec![C64::new(0.0, 1.0), re(0.0)];
    let v = vec![re(1.0), re(0.0)];
    // ⟨u|v⟩ conjugates the first argument.
    assert_eq!(inner(&u, &v), C64::new(0.0, -1.0));
}
