//! Small-momentum fermion eigenphases compared with `√(θ² + k²)`.
//!
//! Along a lattice axis the walk reproduces the Dirac dispersion to second
//! order. Off-axis the doublet splits at first order; its mean stays
//! second-order accurate.

use qca_lab::internal_space::{build_space, Species};
use qca_lab::momentum::{dispersion, MomentumPoint, WalkConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = WalkConfig::unit(build_space(Species::Fermion), 0.01)?;
    let s = 1.0 / 14f64.sqrt();
    println!("{:>10} {:>10} {:>12} {:>12} {:>12}", "direction", "|k|", "exact", "phi_max", "phi_min");
    for (name, dir) in [("x", [1.0, 0.0, 0.0]), ("(1,2,3)", [s, 2.0 * s, 3.0 * s])] {
        for t in [0.0125, 0.025, 0.05] {
            let k = MomentumPoint::new(t * dir[0], t * dir[1], t * dir[2]);
            let exact = (0.01f64.powi(2) + t * t).sqrt();
            let positive: Vec<f64> = dispersion(&cfg, k)?.phases.into_iter().filter(|p| *p > 0.0).collect();
            let hi = positive.iter().copied().fold(f64::MIN, f64::max);
            let lo = positive.iter().copied().fold(f64::MAX, f64::min);
            println!("{name:>10} {t:>10.4} {exact:>12.8} {hi:>12.8} {lo:>12.8}");
        }
    }
    Ok(())
}
