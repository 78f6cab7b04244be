//! Partial sums of the Fourier series of `f(n)`: a square wave with Gibbs
//! overshoot at `|k| = π/2`.

use std::f64::consts::PI;

use qca_lab::toeplitz::{f_tilde, f_tilde_limit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for terms in [11, 101, 1001] {
        let grid: Vec<f64> = (0..=2000).map(|i| -PI + 2.0 * PI * i as f64 / 2000.0).collect();
        let values: Vec<f64> = grid.iter().map(|&k| f_tilde(k, terms)).collect::<Result<_, _>>()?;
        let max = values.iter().copied().fold(f64::MIN, f64::max);
        let min = values.iter().copied().fold(f64::MAX, f64::min);
        let l1: f64 = grid.iter().zip(&values).map(|(&k, v)| (v - f_tilde_limit(k)).abs()).sum::<f64>() / grid.len() as f64;
        println!("terms {terms:>5}: min {min:+.4}, max {max:.4}, mean |error| {l1:.2e}");
    }
    Ok(())
}
