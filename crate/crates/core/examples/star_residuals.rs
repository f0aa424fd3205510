//! Two-sided eigen-equation residuals of W_s for an anharmonic potential.

use phasespace::star::Potential;
use phasespace::*;

fn main() -> Result<()> {
    let grid = make_phase_grid(256, 16.0, 1.0)?;
    let h = HamiltonianSpec::new(1.0, Potential::Polynomial(vec![0.0, 0.0, 0.5, 0.0, 0.05]))?;
    let op = OperatorMatrix::hamiltonian(grid.qgrid, 1.0, 1.0, |q| 0.5 * q * q + 0.05 * q.powi(4));
    for (k, (energy, phi)) in op.eigenstates(3)?.into_iter().enumerate() {
        let rho = DensityMatrix::pure(&phi)?;
        for s in [-0.5, 0.0, 0.5] {
            let w = wigner_s_from_density(&rho, s, &grid)?;
            let r = eigen_residuals(&h, &w.field, energy, s)?;
            println!("level {k}  E={energy:.8}  s={s:+.1}  left {:.2e}  right {:.2e}", r.left, r.right);
        }
    }
    Ok(())
}
