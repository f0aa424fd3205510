//! Husimi functions as coherent-state transition probabilities.

use phasespace::*;

fn main() -> Result<()> {
    let grid = make_phase_grid(256, 16.0, 1.0)?;
    let units = OscillatorUnits::default();
    for n in 0..5 {
        let q = husimi(&hermite_eigenstate(n, &units, &grid.qgrid)?, &units, &grid)?;
        let t = q.transition_probability()?;
        let ((i, j), peak) =
            t.indexed_iter().fold(((0, 0), 0.0), |best, (ij, v)| if *v > best.1 { (ij, *v) } else { best });
        let radius = grid.qgrid.coord(i).hypot(grid.pgrid.coord(j));
        println!("n={n}  max |⟨Γ|n⟩|² = {peak:.6} at |Γ|√2 = {radius:.3}  ∫Q dqdp = {:.10}", q.normalization().re);
    }
    Ok(())
}
