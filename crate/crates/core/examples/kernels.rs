//! Phase-space wavefunctions from different kernels and their unitarity.

use phasespace::*;

fn main() -> Result<()> {
    let grid = make_phase_grid(256, 16.0, 1.0)?;
    let units = OscillatorUnits::default();
    let ygrid = grid.y_lattice(2)?;
    let phi = hermite_eigenstate(2, &units, &grid.qgrid)?;

    let mut sg = GFunction::gaussian(1.0, ygrid)?.scaled((2.0f64 / 1.5).sqrt())?;
    sg.target_s = 0.5;
    let kernels = [
        ("coherent", KernelSpec::new(KernelVariant::CoherentState(units), grid)?, UnitarityMeasure::DGamma),
        ("symmetric coherent", KernelSpec::symmetric_coherent(units, grid)?, UnitarityMeasure::DGamma),
        (
            "gaussian g",
            KernelSpec::new(KernelVariant::GeneralG(GFunction::gaussian(1.0, ygrid)?), grid)?,
            UnitarityMeasure::DGamma,
        ),
        ("s-family s=0.5", KernelSpec::new(KernelVariant::SFamily { g: sg, s: 0.5 }, grid)?, UnitarityMeasure::DGamma),
        ("bargmann", KernelSpec::new(KernelVariant::Bargmann(units), grid)?, UnitarityMeasure::Bargmann),
    ];
    for (name, spec, measure) in &kernels {
        let report = check_kernel_unitarity(spec, *measure)?;
        let psi = kernel_transform(spec, &phi)?;
        let norm = if *measure == UnitarityMeasure::DGamma { format!("{:.12}", psi.norm_sqr()) } else { "-".into() };
        println!("{name:<20} unitarity residual {:.2e}  ∫|ψ|²dΓ = {norm}", report.residual);
    }

    // Bargmann function of |2⟩ is z²/√2
    let barg = kernel_transform(&kernels[4].1, &phi)?;
    let (q, p) = (grid.qgrid.coord(136), grid.pgrid.coord(124));
    let z = units.gamma(q, p);
    println!("f(z) = {:.10}  z²/√2 = {:.10}", barg.field.values[[136, 124]], z * z / 2f64.sqrt());
    Ok(())
}
