use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qca_lab::internal_space::{dirac_gammas, pauli_z, spin1_matrices};
use qca_lab::matrix::{
    eig_hermitian, eig_unitary, exp_i_generator, kron, phase_multiset_distance, ComplexMatrix,
};

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
        ComplexMatrix::from_vec(n, n, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap()
    })
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n).prop_map(|a| {
        let adj = a.adjoint();
        ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| (a[(i, j)] + adj[(i, j)]) * 0.5)
    })
}

fn add(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] + b[(i, j)])
}

#[test]
fn kron_identity_and_doubling() {
    let i6 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
    assert_eq!(i6.max_abs_diff(&ComplexMatrix::identity(6)), 0.0);
    let jx = &spin1_matrices()[0];
    let doubled = kron(&pauli_z(), jx);
    let expected = ComplexMatrix::block_diag(jx, &jx.scale_real(-1.0));
    assert_eq!(doubled.max_abs_diff(&expected), 0.0);
}

#[test]
fn eig_hermitian_examples() {
    let d = ComplexMatrix::diagonal(&[C64::new(3.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
    let v = eig_hermitian(&d).unwrap().real_values();
    assert_eq!(v, vec![1.0, 2.0, 3.0]);
    // k·J along x: characteristic polynomial λ(λ² − k²).
    let kj = spin1_matrices()[0].scale_real(0.3);
    let v = eig_hermitian(&kj).unwrap().real_values();
    for (a, b) in v.iter().zip([-0.3, 0.0, 0.3]) {
        assert!((a - b).abs() < 1e-14);
    }
    let not_h = ComplexMatrix::from_rows(&[vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)]]);
    assert!(eig_hermitian(&not_h).is_err());
}

#[test]
fn eig_unitary_examples() {
    let i = C64::new(0.0, 1.0);
    let p = eig_unitary(&ComplexMatrix::diagonal(&[i, -i])).unwrap().phases();
    let mut p = p;
    p.sort_by(f64::total_cmp);
    assert!((p[0] + std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    assert!((p[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    let g0 = &dirac_gammas()[0];
    let u = exp_i_generator(g0, -0.1).unwrap();
    let phases = eig_unitary(&u).unwrap().phases();
    assert!(phase_multiset_distance(&phases, &[-0.1, -0.1, 0.1, 0.1]) < 1e-13);
}

#[test]
fn exp_matches_taylor_series() {
    let g = dirac_gammas();
    let gen = g[0].matmul(&g[1]);
    // γ₀γ₁ is Hermitian in the Dirac representation.
    let theta = 0.7;
    let u = exp_i_generator(&gen, theta).unwrap();
    let x = gen.scale(C64::new(0.0, theta));
    let mut term = ComplexMatrix::identity(4);
    let mut sum = ComplexMatrix::identity(4);
    for n in 1..=20 {
        term = term.matmul(&x).scale_real(1.0 / n as f64);
        sum = add(&sum, &term);
    }
    assert!(u.max_abs_diff(&sum) < 1e-13);
}

#[test]
fn exp_of_spin1_is_rotation() {
    let a = 0.4f64;
    let u = exp_i_generator(&spin1_matrices()[0], -a).unwrap();
    let (s, c) = a.sin_cos();
    let rot = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, c, -s], vec![0.0, s, c]]);
    assert!(u.max_abs_diff(&rot) < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_matches_four_index_loop(a in matrix(2), b in matrix(2)) {
        let k = kron(&a, &b);
        for i in 0..2 { for j in 0..2 { for p in 0..2 { for q in 0..2 {
            prop_assert_eq!(k[(2 * i + p, 2 * j + q)], a[(i, j)] * b[(p, q)]);
        }}}}
    }

    #[test]
    fn kron_associative_and_bilinear(a in matrix(2), b in matrix(2), c in matrix(2), s in -2.0..2.0f64) {
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-13);
        let lin = kron(&add(&a, &b.scale_real(s)), &c);
        let sum = add(&kron(&a, &c), &kron(&b, &c).scale_real(s));
        prop_assert!(lin.max_abs_diff(&sum) < 1e-13);
    }

    #[test]
    fn hermitian_reconstruction(h in hermitian(4)) {
        let e = eig_hermitian(&h).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&h) < 1e-11);
        prop_assert!(e.vectors.unitary_deviation() < 1e-12);
        prop_assert!(e.values.iter().all(|z| z.im.abs() < 1e-12));
        let v = e.real_values();
        prop_assert!(v.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(e.max_residual(&h) <= 1e-11 * h.frobenius_norm().max(1.0));
    }

    #[test]
    fn exponential_group_law(h in hermitian(4), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let us = exp_i_generator(&h, s).unwrap();
        let ut = exp_i_generator(&h, t).unwrap();
        let ust = exp_i_generator(&h, s + t).unwrap();
        prop_assert!(us.matmul(&ut).max_abs_diff(&ust) < 1e-12);
        prop_assert!(ust.unitary_deviation() < 1e-12);
    }

    #[test]
    fn adjoint_negates_phases(h in hermitian(5), s in -1.0..1.0f64) {
        let u = exp_i_generator(&h, s).unwrap();
        let p = eig_unitary(&u).unwrap().phases();
        let q: Vec<f64> = eig_unitary(&u.adjoint()).unwrap().phases().iter().map(|x| -x).collect();
        prop_assert!(phase_multiset_distance(&p, &q) < 1e-12);
        let e = eig_unitary(&u).unwrap();
        prop_assert!(e.values.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
    }
}
