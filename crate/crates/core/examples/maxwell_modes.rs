//! Photon polarizations and the plane-wave Maxwell residual.

use num_complex::Complex64;
use qca_lab::momentum::{maxwell_residual, polarization_basis, MomentumPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = MomentumPoint::new(0.3, -0.2, 0.5);
    let (v0, vp, vm) = polarization_basis(k)?;
    for (name, v) in [("v0", v0), ("v+", vp), ("v-", vm)] {
        let parts: Vec<String> = v.iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
        println!("{name}: ({})", parts.join(", "));
    }
    for (ap, am) in [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8)] {
        let r = maxwell_residual(k, Complex64::new(ap, 0.0), Complex64::new(0.0, am))?;
        println!("a+ = {ap}, a- = {am}i: residual {r:.2e}");
    }
    Ok(())
}
