//! Operator ↔ symbol transforms: roundtrips and the oscillator spectrum.

use phasespace::*;

fn main() -> Result<()> {
    let grid = make_phase_grid(256, 16.0, 1.0)?;
    let units = OscillatorUnits::default();
    let w0 = wigner_from_pure(&hermite_eigenstate(0, &units, &grid.qgrid)?, &grid)?;
    for s in [-0.5, 0.0, 1.0] {
        let back = operator_to_symbol(&symbol_to_operator(&w0.field, s)?, s, &grid)?;
        println!("s={s:+.1}  roundtrip max error {:.2e}", back.max_abs_diff(&w0.field));
    }
    let hsym = HamiltonianSpec::harmonic(&units).symbol(&grid)?;
    let evals = symbol_to_operator(&hsym, 0.0)?.eigenvalues();
    for (n, e) in evals.iter().take(6).enumerate() {
        println!("E_{n} = {e:.9}");
    }
    let coherent = coherent_wavefunction(units.gamma(1.0, 0.5), &units, &grid.qgrid)?;
    let w = wigner_s_from_density(&DensityMatrix::pure(&coherent)?, 0.5, &grid)?;
    let h = OperatorMatrix::harmonic(grid.qgrid, &units);
    println!("⟨H⟩ in a coherent state = {:.9}", expectation(&w, &h)?.re);
    Ok(())
}
