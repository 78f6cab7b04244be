//! `‖τ U τ† − U†‖` for both gate conventions and for bosons.

use qca_lab::qca1d::{time_reversal_defect, GateConvention, Lattice1DConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for theta in [0.0, 0.2, 1.1] {
        for conv in [GateConvention::Table, GateConvention::Exponential] {
            let cfg = Lattice1DConfig::fermion(4, theta).with_convention(conv);
            println!("fermion N=4 theta={theta} {conv:?}: {:.1e}", time_reversal_defect(&cfg)?);
        }
    }
    let boson = Lattice1DConfig::boson(4, 2);
    println!("boson N=4 B=2: {:.1e}", time_reversal_defect(&boson)?);
    Ok(())
}
