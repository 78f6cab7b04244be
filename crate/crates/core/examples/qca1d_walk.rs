//! One fermion on an 8-site ring: amplitudes after a few steps and the
//! one-particle spectrum.

use qca_lab::matrix::eig_unitary;
use qca_lab::qca1d::{build_evolution, single_particle_block, Lattice1DConfig, LatticeState1D};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Lattice1DConfig::fermion(8, 0.3);
    let u = build_evolution(&cfg)?;
    let mut state = LatticeState1D::single_excitation(cfg.basis()?, 0, true);
    for step in 1..=4 {
        state = state.evolve(&u);
        let mut snap = state.snapshot(1e-12);
        snap.sort_by(|a, b| (b.1.hypot(b.2)).total_cmp(&a.1.hypot(a.2)));
        let top: Vec<String> = snap.iter().take(3).map(|(l, re, im)| format!("{l}: {:.3}", re.hypot(*im))).collect();
        println!("step {step}: {}", top.join("  "));
    }
    let mut phases = eig_unitary(&single_particle_block(&cfg)?)?.phases();
    phases.sort_by(f64::total_cmp);
    println!("one-particle phases: {phases:.4?}");
    Ok(())
}
