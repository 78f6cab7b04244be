use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qca_lab::matrix::eig_hermitian;
use qca_lab::toeplitz::{
    d_complex_matrix, dbar_eigenvalues, dbar_matrix, f_tilde, finite_size_correction,
    momentum_space_coupling, negative_coupling, symbol_f, CouplingProfile, ToeplitzSpec,
};

fn profile(m: usize) -> impl Strategy<Value = CouplingProfile> {
    let c = (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b));
    (prop::collection::vec(c.clone(), m + 1), prop::collection::vec(c, m + 1))
        .prop_map(|(v_plus, v_minus)| CouplingProfile { v_plus, v_minus })
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

#[test]
fn symbol_values() {
    assert_eq!(symbol_f(0), 0.5);
    assert_eq!(symbol_f(2), 0.0);
    assert!((symbol_f(1) - 1.0 / PI).abs() < 1e-16);
    assert!((symbol_f(3) + 1.0 / (3.0 * PI)).abs() < 1e-16);
    assert!((symbol_f(5) - 1.0 / (5.0 * PI)).abs() < 1e-16);
    assert_eq!(symbol_f(-3), symbol_f(3));
}

#[test]
fn single_entry_matrix() {
    let d = dbar_matrix(&ToeplitzSpec::infinite(0)).unwrap();
    assert_eq!(d.rows(), 1);
    assert_eq!(dbar_eigenvalues(&ToeplitzSpec::infinite(0)).unwrap(), vec![0.5]);
}

#[test]
fn spectrum_in_unit_interval() {
    for m in [2, 10, 20, 40] {
        let spec = ToeplitzSpec::infinite(m);
        let d = dbar_matrix(&spec).unwrap();
        for j in 1..d.rows() {
            for jp in 1..d.rows() {
                assert_eq!(d[(j, jp)], d[(j - 1, jp - 1)]);
            }
        }
        let ev = dbar_eigenvalues(&spec).unwrap();
        assert!(ev[0] > -1e-14 && *ev.last().unwrap() < 1.0 + 1e-13, "M={m}: {ev:?}");
    }
}

#[test]
fn d_and_dbar_share_eigenvalues() {
    let spec = ToeplitzSpec::finite(6, 256);
    let d = d_complex_matrix(&spec).unwrap();
    assert!(d.hermitian_deviation() < 1e-13);
    for j in 0..d.rows() {
        assert!((d[(j, j)] - C64::new(0.5, 0.0)).norm() < 1e-15);
    }
    let a = eig_hermitian(&d).unwrap().real_values();
    let b = dbar_eigenvalues(&spec).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn finite_size_is_second_order() {
    let ratio = finite_size_correction(6, 1024).unwrap() / finite_size_correction(6, 4096).unwrap();
    assert!((ratio - 16.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn square_wave_limits() {
    assert!((f_tilde(0.0, 100_000).unwrap() - 1.0).abs() < 1e-4);
    assert!(f_tilde(PI, 100_000).unwrap().abs() < 1e-4);
    let min = (0..=400)
        .map(|i| f_tilde(-PI + 2.0 * PI * i as f64 / 400.0, 2001).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(min.abs() < 1e-2 || min > -0.1, "min {min}");
    assert!(f_tilde(0.3, 0).is_err());
}

#[test]
fn minimizing_profile_gives_twice_lambda_min() {
    let spec = ToeplitzSpec::finite(6, 64);
    let e = eig_hermitian(&d_complex_matrix(&spec).unwrap()).unwrap();
    let v = e.vectors.column(0);
    let profile = CouplingProfile {
        v_plus: v.clone(),
        v_minus: v.iter().map(|z| z.conj()).collect(),
    };
    let value = negative_coupling(&profile, &spec).unwrap();
    assert!((value - 2.0 * e.values[0].re).abs() < 1e-13);
    assert_eq!(negative_coupling(&CouplingProfile::zeros(6), &spec).unwrap(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_geometric_sum(half_n in 4usize..64, j in 0usize..8, jp in 0usize..8) {
        let big_n = 2 * half_n;
        let spec = ToeplitzSpec::finite(6, big_n);
        prop_assume!(big_n > 2 * spec.m);
        let d = d_complex_matrix(&spec).unwrap();
        let (j, jp) = (j.min(6), jp.min(6));
        let direct: C64 = (1..=half_n)
            .map(|l| C64::from_polar(1.0, -2.0 * PI * (j as f64 - jp as f64) * l as f64 / big_n as f64))
            .sum::<C64>() / big_n as f64;
        prop_assert!((d[(j, jp)] - direct).norm() < 1e-13);
    }

    #[test]
    fn quadratic_form_matches_momentum_sum(p in profile(6), x in -5i64..5) {
        let spec = ToeplitzSpec::finite(6, 64);
        let q = negative_coupling(&p, &spec).unwrap();
        let brute = momentum_space_coupling(&p, &spec, x).unwrap();
        prop_assert!((q - brute).abs() <= 1e-10 * brute.max(1.0));
        prop_assert!(q >= 0.0);
        let lmin = dbar_eigenvalues(&spec).unwrap()[0];
        prop_assert!(q >= lmin * (norm_sqr(&p.v_plus) + norm_sqr(&p.v_minus)) - 1e-12);
    }

    #[test]
    fn partial_sums_bounded_away_from_jump(k in -PI..PI, terms in 100usize..3000) {
        prop_assume!((k.abs() - PI / 2.0).abs() > 0.1);
        let v = f_tilde(k, terms).unwrap();
        prop_assert!((-0.1..=1.1).contains(&v), "{v}");
    }

    #[test]
    fn dbar_is_positive_semidefinite(m in (0usize..20).prop_map(|h| 2 * h), z in prop::collection::vec(-1.0..1.0f64, 41)) {
        let d = dbar_matrix(&ToeplitzSpec::infinite(m)).unwrap();
        let v: Vec<C64> = z.iter().take(m + 1).map(|&x| C64::new(x, 0.0)).collect();
        let dv = d.mul_vec(&v);
        let q: f64 = v.iter().zip(&dv).map(|(a, b)| (a.conj() * b).re).sum();
        prop_assert!(q >= -1e-14 && q <= norm_sqr(&v) + 1e-14);
    }
}
