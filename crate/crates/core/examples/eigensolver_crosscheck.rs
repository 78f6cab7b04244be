//! Eigenvalues from Sturm bisection at 40 digits against the double-precision
//! Hermitian solver, on random SPD matrices and on small `D̄`.

use qca_lab::cli::{eigen_crosscheck, random_spd_rows};
use qca_lab::toeplitz::{dbar_rows, ToeplitzSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [5, 10, 20] {
        let (rel, _) = eigen_crosscheck(&random_spd_rows(n, &mut rng), 40)?;
        println!("random SPD n={n:>2}: max relative difference {rel:.2e}");
    }
    for m in [4, 8, 12] {
        let (rel, norm) = eigen_crosscheck(&dbar_rows(&ToeplitzSpec::infinite(m))?, 40)?;
        println!("D̄ M={m:>2}: per-eigenvalue {rel:.2e}, normwise {norm:.2e}");
    }
    Ok(())
}
