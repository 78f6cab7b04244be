//! Equal-norm constants of the three internal spaces.

use qca_lab::internal_space::{build_space, max_anticommutator, verify_equal_norm, Species};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for species in [Species::Fermion, Species::Boson, Species::BosonDoubled] {
        let space = build_space(species);
        let r = verify_equal_norm(&space)?;
        let c_prime = r.c_prime.map_or("-".to_string(), |c| format!("{c:.3}"));
        println!(
            "{species:?}: dim {}, c = {:.3}, c' = {c_prime}, max violation {:.1e}",
            space.dim, r.c, r.max_violation
        );
    }
    let dirac = build_space(Species::Fermion);
    println!("max |{{A, B}}| over Q and the three ΔP: {:.1e}", max_anticommutator(&dirac));
    Ok(())
}
