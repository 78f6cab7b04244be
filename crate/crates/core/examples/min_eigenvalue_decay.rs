//! Smallest eigenvalue of D̄ against the range M, and the fitted decay rate.
//!
//! Run with `cargo run --release --example min_eigenvalue_decay`.

use qca_lab::fit::fit_exp_decay;
use qca_lab::highprec::{min_eig_series, PrecisionPolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ms: Vec<usize> = (20..=60).step_by(4).collect();
    let series = min_eig_series(&ms, PrecisionPolicy::Min(80))?;
    println!("{:>4}  {:>6}  lambda_min", "M", "digits");
    for p in &series {
        println!("{:>4}  {:>6}  {}", p.m, p.result.digits, p.result.lambda_min.to_decimal_with(20));
    }
    let points: Vec<(f64, f64)> = series.iter().map(|p| (p.m as f64, p.result.lambda_min.to_f64())).collect();
    let fit = fit_exp_decay(&points)?;
    println!("alpha = {:.6}, r^2 = {:.8}", fit.parameters[0], fit.r_squared);
    Ok(())
}
