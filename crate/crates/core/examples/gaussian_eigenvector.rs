//! The minimizing eigenvector of `D̄` for `M = 60` and its Gaussian fit.
//!
//! Run with `cargo run --release --example gaussian_eigenvector`.

use qca_lab::fit::fit_gaussian;
use qca_lab::highprec::{build_dbar_bigreal, min_eigpair, required_digits};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = 60;
    let digits = required_digits(m).max(90);
    let r = min_eigpair(&build_dbar_bigreal(m, digits)?, digits)?;
    let v: Vec<f64> = r.eigenvector.iter().map(|x| x.to_f64().abs()).collect();
    let fit = fit_gaussian(&v)?;
    let [amp, center, width] = [fit.parameters[0], fit.parameters[1], fit.parameters[2]];
    println!("lambda_min = {}", r.lambda_min.to_decimal_with(12));
    println!("fit: amplitude {amp:.5}, center {center:.4}, width {width:.4}, r^2 {:.7}", fit.r_squared);
    for (j, x) in v.iter().enumerate().step_by(5) {
        let model = amp * (-(j as f64 - center).powi(2) / (2.0 * width * width)).exp();
        println!("{j:>3} {x:.6e} {model:.6e}");
    }
    Ok(())
}
