//! An on-site fermion–boson coupling creates bosons in both energy branches.
//!
//! Start with one fermion and no bosons, apply `U_I` once, and read off the
//! boson populations per momentum.

use num_complex::Complex64;
use qca_lab::qca1d::{
    interaction_unitary, mode_index, negative_mode_population, translation_commutator,
    InteractionCoeffs, JointSpace, Lattice1DConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 4;
    let cfg_f = Lattice1DConfig::fermion(n, 0.2);
    let cfg_b = Lattice1DConfig::boson(n, 1);
    let space = JointSpace::new(&cfg_f, &cfg_b)?;
    let coeffs = InteractionCoeffs::uniform(Complex64::new(0.1, 0.0));
    let u = interaction_unitary(&cfg_f, &cfg_b, &coeffs)?;
    println!("[U_I, T] = {:.1e}", translation_commutator(&u, &cfg_f, Some(&cfg_b))?);

    let mut fermions = vec![0u8; 2 * n];
    fermions[mode_index(0, true)] = 1;
    let start = space.index_of(&fermions, &vec![0u8; 2 * n]).ok_or("state outside the basis")?;
    let amplitudes = u.column(start);
    println!("{:>8} {:>12} {:>12}", "k", "positive", "negative");
    for p in negative_mode_population(&amplitudes, &space.boson_basis) {
        println!("{:>8.4} {:>12.3e} {:>12.3e}", p.k, p.positive, p.negative);
    }
    Ok(())
}
