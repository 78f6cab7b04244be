//! Least-squares fits for decay rates and Gaussian profiles.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} points (got {got})")]
    TooFewPoints { needed: usize, got: usize },
    #[error("value {value} at index {index} is not positive")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("Gauss-Newton did not converge")]
    NoConvergence,
}

/// Fitted parameters with goodness-of-fit measures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub parameters: Vec<f64>,
    pub r_squared: f64,
    pub residual_max: f64,
}

fn r_squared(y: &[f64], fitted: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = y.iter().zip(fitted).map(|(a, b)| (a - b).powi(2)).sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

/// Fits `λ ≈ e^{c − αM}` by least squares on `ln λ`.
///
/// Parameters are `[alpha, log_prefactor]`; `r_squared` and
/// `residual_max` refer to the log-domain fit.
pub fn fit_exp_decay(points: &[(f64, f64)]) -> Result<FitResult, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if let Some((index, &(_, value))) = points.iter().enumerate().find(|(_, p)| !(p.1 > 0.0)) {
        return Err(FitError::NonPositiveValue { index, value });
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FitError::DegenerateData("all M values are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let fitted: Vec<f64> = xs.iter().map(|x| intercept + slope * x).collect();
    let residual_max = ys.iter().zip(&fitted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(FitResult {
        parameters: vec![-slope, intercept],
        r_squared: r_squared(&ys, &fitted),
        residual_max,
    })
}

/// Relative tolerance for bumps that break unimodality.
pub const UNIMODAL_TOL: f64 = 0.05;
const MAX_GN_ITERATIONS: usize = 500;

fn gaussian(j: f64, p: &[f64; 3]) -> f64 {
    let [a, mu, sigma] = *p;
    a * (-(j - mu).powi(2) / (2.0 * sigma * sigma)).exp()
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, slot) in out.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = b[r];
        }
        *slot = det(&mc) / d;
    }
    Some(out)
}

/// Fits `|v_j| ≈ A exp(−(j − μ)²/(2σ²))` with `j` the 0-based index.
///
/// Parameters are `[amplitude, center, width]`. Initialised from a
/// weighted quadratic fit of `ln|v_j|`, then refined by damped
/// Gauss–Newton on the linear residuals.
pub fn fit_gaussian(v: &[f64]) -> Result<FitResult, FitError> {
    if v.len() < 5 {
        return Err(FitError::TooFewPoints { needed: 5, got: v.len() });
    }
    let y: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    if y.iter().any(|x| !x.is_finite()) {
        return Err(FitError::DegenerateData("non-finite entries".into()));
    }
    let peak_idx = (0..y.len()).max_by(|&a, &b| y[a].total_cmp(&y[b])).expect("nonempty");
    let peak = y[peak_idx];
    if peak == 0.0 || y.iter().all(|&x| (x - peak).abs() <= 1e-14 * peak) {
        return Err(FitError::DegenerateData("all entries are equal".into()));
    }
    let tol = UNIMODAL_TOL * peak;
    let rising = (1..=peak_idx).all(|j| y[j] >= y[j - 1] - tol);
    let falling = (peak_idx + 1..y.len()).all(|j| y[j] <= y[j - 1] + tol);
    if !rising || !falling {
        return Err(FitError::DegenerateData("profile is not unimodal".into()));
    }

    // Weighted log-domain quadratic: ln y ≈ c0 + c1 j + c2 j², weights y².
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    let floor = peak * 1e-12;
    for (j, &yj) in y.iter().enumerate() {
        if yj <= floor {
            continue;
        }
        let x = j as f64 - peak_idx as f64;
        let basis = [1.0, x, x * x];
        let w = (yj / peak).powi(2);
        for r in 0..3 {
            for c in 0..3 {
                ata[r][c] += w * basis[r] * basis[c];
            }
            atb[r] += w * basis[r] * yj.ln();
        }
    }
    let [c0, c1, c2] = solve3(ata, atb).ok_or_else(|| FitError::DegenerateData("too few positive entries".into()))?;
    if !(c2 < 0.0) {
        return Err(FitError::DegenerateData("log profile is not concave".into()));
    }
    let sigma0 = (-1.0 / (2.0 * c2)).sqrt();
    let mu0 = peak_idx as f64 - c1 / (2.0 * c2);
    let a0 = (c0 - c1 * c1 / (4.0 * c2)).exp();
    let mut p = [a0, mu0, sigma0];

    let sse = |p: &[f64; 3]| -> f64 { y.iter().enumerate().map(|(j, &yj)| (gaussian(j as f64, p) - yj).powi(2)).sum() };
    let mut cost = sse(&p);
    let mut lambda = 1e-3;
    let mut converged = false;
    for _ in 0..MAX_GN_ITERATIONS {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (j, &yj) in y.iter().enumerate() {
            let x = j as f64;
            let g = gaussian(x, &p);
            let d = x - p[1];
            let grad = [g / p[0], g * d / (p[2] * p[2]), g * d * d / p[2].powi(3)];
            let r = g - yj;
            for a in 0..3 {
                for b in 0..3 {
                    jtj[a][b] += grad[a] * grad[b];
                }
                jtr[a] += grad[a] * r;
            }
        }
        let mut damped = jtj;
        for (k, row) in damped.iter_mut().enumerate() {
            row[k] *= 1.0 + lambda;
        }
        let Some(step) = solve3(damped, jtr) else { break };
        let trial = [p[0] - step[0], p[1] - step[1], p[2] - step[2]];
        let trial_cost = sse(&trial);
        if trial[2] > 0.0 && trial_cost <= cost {
            let rel = (0..3).map(|k| (step[k] / p[k].abs().max(1e-300)).abs()).fold(0.0, f64::max);
            p = trial;
            let improvement = cost - trial_cost;
            cost = trial_cost;
            lambda = (lambda * 0.3).max(1e-12);
            if rel < 1e-13 || improvement <= 1e-15 * cost.max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                converged = true;
                break;
            }
        }
    }
    if !converged || !p.iter().all(|x| x.is_finite()) {
        return Err(FitError::NoConvergence);
    }
    let fitted: Vec<f64> = (0..y.len()).map(|j| gaussian(j as f64, &p)).collect();
    let residual_max = y.iter().zip(&fitted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(FitResult {
        parameters: p.to_vec(),
        r_squared: r_squared(&y, &fitted),
        residual_max,
    })
}
