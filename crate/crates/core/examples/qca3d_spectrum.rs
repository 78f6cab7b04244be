//! Bosonic QCA in momentum space: product of the six factors, the closed
//! form, and the eigenphases `{0, ±φ}` with `cos φ = G/2`.

use qca_lab::matrix::eig_unitary;
use qca_lab::momentum::{qca_c_closed_form, qca_c_eigenphases, qca_c_matrix, MomentumPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for t in [0.01, 0.1, 0.5, 1.0] {
        let k = MomentumPoint::new(t, 0.5 * t, -0.3 * t);
        let product = qca_c_matrix(k, 1.0, false);
        let gap = product.max_abs_diff(&qca_c_closed_form(k, 1.0));
        let (_, phi, _) = qca_c_eigenphases(k, 1.0)?;
        let mut numeric = eig_unitary(&product)?.phases();
        numeric.sort_by(f64::total_cmp);
        println!(
            "|k| = {:.4}: phi = {phi:.8} (|k| ratio {:.6}), numeric {numeric:.8?}, closed-form gap {gap:.1e}",
            k.norm(),
            phi / k.norm()
        );
    }
    Ok(())
}
