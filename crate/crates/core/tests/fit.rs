use proptest::prelude::*;
use qca_lab::fit::{fit_exp_decay, fit_gaussian, FitError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian(n: usize, a: f64, mu: f64, sigma: f64) -> Vec<f64> {
    (0..n).map(|j| a * (-(j as f64 - mu).powi(2) / (2.0 * sigma * sigma)).exp()).collect()
}

#[test]
fn exact_decay() {
    let pts: Vec<(f64, f64)> = [10.0f64, 20.0, 30.0].iter().map(|&m| (m, (-2.0 * m).exp())).collect();
    let r = fit_exp_decay(&pts).unwrap();
    assert!((r.parameters[0] - 2.0).abs() < 1e-12);
    assert!((r.r_squared - 1.0).abs() < 1e-12);
    assert!(matches!(fit_exp_decay(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]), Err(FitError::NonPositiveValue { .. })));
}

/// 1% multiplicative noise, uniform in `[−1%, 1%]`, over 100 seeds.
#[test]
fn decay_rate_under_noise() {
    let truth = 1.755;
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<(f64, f64)> = (20..=60)
            .step_by(4)
            .map(|m| {
                let m = m as f64;
                (m, (-truth * m).exp() * (1.0 + rng.gen_range(-0.01..0.01)))
            })
            .collect();
        let r = fit_exp_decay(&pts).unwrap();
        worst = worst.max((r.parameters[0] - truth).abs());
    }
    assert!(worst < 0.02, "worst deviation {worst}");
}

#[test]
fn exact_gaussian_and_errors() {
    let v = gaussian(41, 0.3, 19.4, 5.5);
    let r = fit_gaussian(&v).unwrap();
    assert!((r.r_squared - 1.0).abs() < 1e-10);
    assert!((r.parameters[1] - 19.4).abs() < 1e-8 && (r.parameters[2].abs() - 5.5).abs() < 1e-8);
    assert!(fit_gaussian(&[1.0; 9]).is_err());
    assert!(fit_gaussian(&[1.0, 2.0, 3.0]).is_err());
    assert!(fit_gaussian(&[1.0, 5.0, 1.0, 5.0, 1.0, 5.0, 1.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaussian_fit_ignores_scale(mu in 8.0..22.0f64, sigma in 2.0..6.0f64, scale in 1e-3..1e3f64, noise in prop::collection::vec(-1e-3..1e-3f64, 31)) {
        let v: Vec<f64> = gaussian(31, 1.0, mu, sigma).iter().zip(&noise).map(|(x, e)| x * (1.0 + e)).collect();
        let w: Vec<f64> = v.iter().map(|x| -x * scale).collect();
        let a = fit_gaussian(&v).unwrap();
        let b = fit_gaussian(&w).unwrap();
        prop_assert!((a.r_squared - b.r_squared).abs() < 1e-9);
        prop_assert!((a.parameters[1] - b.parameters[1]).abs() < 1e-7);
        prop_assert!((a.parameters[2].abs() - b.parameters[2].abs()).abs() < 1e-7);
        prop_assert!((b.parameters[0].abs() / a.parameters[0].abs() / scale - 1.0).abs() < 1e-7);
        prop_assert!((b.residual_max / a.residual_max / scale - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reversal_reflects_center(mu in 8.0..22.0f64, sigma in 2.0..6.0f64, noise in prop::collection::vec(-1e-3..1e-3f64, 31)) {
        let v: Vec<f64> = gaussian(31, 1.0, mu, sigma).iter().zip(&noise).map(|(x, e)| x * (1.0 + e)).collect();
        let rev: Vec<f64> = v.iter().rev().copied().collect();
        let a = fit_gaussian(&v).unwrap();
        let b = fit_gaussian(&rev).unwrap();
        prop_assert!((a.r_squared - b.r_squared).abs() < 1e-9);
        prop_assert!((a.parameters[1] + b.parameters[1] - 30.0).abs() < 1e-7);
        prop_assert!(a.r_squared <= 1.0 && a.residual_max >= 0.0);
    }
}
