//! The 5×5 matrix `π D̄` for `M = 4`, its spectrum, and the finite-lattice
//! correction.

use std::f64::consts::PI;

use qca_lab::toeplitz::{dbar_eigenvalues, dbar_rows, finite_size_correction, ToeplitzSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ToeplitzSpec::infinite(4);
    for row in dbar_rows(&spec)? {
        let scaled: Vec<String> = row.iter().map(|x| format!("{:>8.4}", x * PI)).collect();
        println!("{}", scaled.join(" "));
    }
    println!("eigenvalues: {:.6?}", dbar_eigenvalues(&spec)?);
    for n in [64, 256, 1024] {
        println!("N = {n:>4}: ‖D̄_N − D̄_∞‖ = {:.3e}", finite_size_correction(4, n)?);
    }
    Ok(())
}
