//! Wigner functions of the first oscillator eigenstates and their marginals.

use phasespace::*;

fn main() -> Result<()> {
    let grid = make_phase_grid(256, 16.0, 1.0)?;
    let units = OscillatorUnits::default();
    for n in 0..4 {
        let phi = hermite_eigenstate(n, &units, &grid.qgrid)?;
        let w = wigner_from_pure(&phi, &grid)?;
        let origin = w.field.values[[128, 128]].re;
        let m = marginals(&w);
        let err = grid
            .qgrid
            .coords()
            .iter()
            .zip(&phi.values)
            .zip(&m.pq)
            .fold(0.0f64, |e, ((_, f), pq)| e.max((pq - f.norm_sqr()).abs()));
        println!(
            "n={n}  W(0,0)={origin:+.6}  expected {:+.6}  ∫W={:.12}  purity={:.12}  |∫W dp - |φ|²|={err:.1e}",
            if n.is_multiple_of(2) { 1.0 } else { -1.0 } / std::f64::consts::PI,
            w.normalization().re,
            purity_integral(&w)?,
        );
    }
    Ok(())
}
