use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qca_lab::internal_space::{
    build_boson_space, build_fermion_space, max_anticommutator, spin1_matrices, verify_equal_norm,
};
use qca_lab::matrix::ComplexMatrix;

const I: C64 = C64::new(0.0, 1.0);

#[test]
fn fermion_projector_traces_and_sandwich() {
    let s = build_fermion_space();
    for ax in 0..3 {
        assert!((s.p_plus[ax].trace() - C64::new(2.0, 0.0)).norm() < 1e-14);
        assert!((s.p_minus[ax].trace() - C64::new(2.0, 0.0)).norm() < 1e-14);
    }
    let lhs = s.p_plus[0].matmul(&s.p_plus[1]).matmul(&s.p_plus[0]);
    assert!(lhs.max_abs_diff(&s.p_plus[0].scale_real(0.5)) < 1e-14);
    assert!(max_anticommutator(&s) < 1e-13);
    let r = verify_equal_norm(&s).unwrap();
    assert!((r.c - 0.5).abs() < 1e-13 && r.max_violation <= 1e-13);
}

#[test]
fn boson_j_x_entries() {
    let jx = &spin1_matrices()[0];
    for i in 0..3 {
        for j in 0..3 {
            let expected = match (i, j) {
                (1, 2) => -I,
                (2, 1) => I,
                _ => C64::new(0.0, 0.0),
            };
            assert_eq!(jx[(i, j)], expected);
        }
    }
}

/// Equal-norm constants from the overlaps `|⟨k_i|k'_j⟩|²` of explicit
/// eigenvectors of the spin-1 matrices.
#[test]
fn boson_constants_from_overlaps() {
    let s3 = 0.5f64.sqrt();
    // Eigenvectors of J_X (eigenvalues +1, −1, 0) and J_Y.
    let jx: [[C64; 3]; 3] = [
        [C64::new(0.0, 0.0), C64::new(s3, 0.0), C64::new(0.0, s3)],
        [C64::new(0.0, 0.0), C64::new(s3, 0.0), C64::new(0.0, -s3)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
    ];
    let jy: [[C64; 3]; 3] = [
        [C64::new(s3, 0.0), C64::new(0.0, 0.0), C64::new(0.0, -s3)],
        [C64::new(s3, 0.0), C64::new(0.0, 0.0), C64::new(0.0, s3)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    ];
    let j = spin1_matrices();
    for (vecs, m) in [(&jx, &j[0]), (&jy, &j[1])] {
        for (v, l) in vecs.iter().zip([1.0, -1.0, 0.0]) {
            let mv = m.mul_vec(v);
            assert!(mv.iter().zip(v).all(|(a, b)| (a - b * l).norm() < 1e-15));
        }
    }
    let overlap = |a: &[C64; 3], b: &[C64; 3]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr();
    let c = overlap(&jx[0], &jy[0]);
    let c_prime = overlap(&jx[0], &jy[2]);
    for space in [build_boson_space(false), build_boson_space(true)] {
        let r = verify_equal_norm(&space).unwrap();
        assert!((r.c - c).abs() < 1e-13, "{} vs {c}", r.c);
        assert!((r.c_prime.unwrap() - c_prime).abs() < 1e-13);
        assert!((r.c - 0.25).abs() < 1e-13 && (r.c_prime.unwrap() - 0.5).abs() < 1e-13);
    }
}

#[test]
fn boson_zero_projectors() {
    let s = build_boson_space(false);
    let p0 = s.p_zero.as_ref().unwrap();
    assert!(p0[0].matmul(&p0[1]).max_abs() < 1e-15);
    let sum = ComplexMatrix::from_fn(3, 3, |i, j| p0[0][(i, j)] + p0[1][(i, j)] + p0[2][(i, j)]);
    assert!(sum.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-13);
}

#[test]
fn doubled_parity() {
    let s = build_boson_space(true);
    let p = s.parity.as_ref().unwrap();
    assert!(p.matmul(p).max_abs_diff(&ComplexMatrix::identity(6)) < 1e-13);
    for ax in 0..3 {
        assert!(p.matmul(&s.p_plus[ax]).matmul(p).max_abs_diff(&s.p_minus[ax]) < 1e-13);
        assert!(p.matmul(&s.delta_p[ax]).matmul(p).max_abs_diff(&s.delta_p[ax].scale_real(-1.0)) < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn k_dot_j_is_i_k_cross(
        k in prop::array::uniform3(-1.0..1.0f64),
        v in prop::array::uniform3((-1.0..1.0f64, -1.0..1.0f64)),
    ) {
        let n = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        prop_assume!(n > 1e-3);
        let kh = k.map(|x| x / n);
        let v = v.map(|(a, b)| C64::new(a, b));
        let j = spin1_matrices();
        let kj = ComplexMatrix::from_fn(3, 3, |r, c| (0..3).map(|a| j[a][(r, c)] * kh[a]).sum());
        let lhs = kj.mul_vec(&v);
        let cross = [
            kh[1] * v[2] - kh[2] * v[1],
            kh[2] * v[0] - kh[0] * v[2],
            kh[0] * v[1] - kh[1] * v[0],
        ];
        for (a, b) in lhs.iter().zip(cross) {
            prop_assert!((a - I * b).norm() < 1e-13);
        }
    }
}
