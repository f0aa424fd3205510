//! General one-sided solutions for arbitrary g, against the two-sided Wigner choice.

use phasespace::solutions::random_gaussian_mixture_g;
use phasespace::*;

fn main() -> Result<()> {
    let grid = make_phase_grid(256, 16.0, 1.0)?;
    let units = OscillatorUnits::default();
    let ygrid = grid.y_lattice(2)?;
    let h = HamiltonianSpec::harmonic(&units);
    let n = 1;
    let phi = hermite_eigenstate(n, &units, &grid.qgrid)?;
    let energy = units.energy(n);
    println!("{:>5} {:>10} {:>12} {:>12}", "s", "g", "left", "right");
    for s in [-0.5, 0.0, 0.5, 1.0] {
        let choices =
            [("random", random_gaussian_mixture_g(ygrid, s, 3, 7)?), ("wigner", wigner_conjugate_g(&phi, s, ygrid)?)];
        for (label, g) in choices {
            let psi = solve_section3(&phi, &g, s, &grid)?;
            let r = eigen_residuals(&h, &psi.field, energy, s)?;
            println!("{s:>5} {label:>10} {:>12.2e} {:>12.2e}", r.left, r.right);
        }
    }
    Ok(())
}
