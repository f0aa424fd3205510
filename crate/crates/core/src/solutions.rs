//! General solutions of the phase-space eigenvalue equations built from a
//! position eigenfunction `φ` and an arbitrary nonzero function `g`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, Grid1D, LatticeTransform, PhaseSpaceGrid, SecondAxis};
use crate::kernels::{
    g_tilde, kernel_transform, Convention, GFunction, KernelSpec, KernelVariant, PhaseSpaceWavefunction,
};
use crate::states::PositionWavefunction;

/// `ψ_g(q,p) = e^{-iqp/2ħ} ∫ e^{-ipy/ħ} g(y) φ(q+y) dy`.
pub fn solve_section2(
    phi: &PositionWavefunction,
    g: &GFunction,
    grid: &PhaseSpaceGrid,
) -> Result<PhaseSpaceWavefunction> {
    let spec = KernelSpec::new(KernelVariant::GeneralG(g.clone()), *grid)?;
    kernel_transform(&spec, phi)
}

/// `ψ_s(q,p) = e^{-2ipq/ħ(1+s)} ∫ e^{-ipy/ħ} g_s(y) φ(2q/(1+s) + (1-s)y/2) dy`.
///
/// At `s = 1` this is `e^{-ipq/ħ} g̃(p) φ(q)`; `s = -1` has no solution of this form.
pub fn solve_section3(
    phi: &PositionWavefunction,
    g: &GFunction,
    s: f64,
    grid: &PhaseSpaceGrid,
) -> Result<PhaseSpaceWavefunction> {
    if (s + 1.0).abs() < 1e-12 {
        return Err(Error::SingularOrdering);
    }
    if !phi.grid.same_as(&grid.qgrid) {
        return Err(Error::GridMismatch("wavefunction grid differs from the phase-space q grid".into()));
    }
    let hbar = grid.hbar;
    let qs = grid.qgrid.coords();
    let ps = grid.pgrid.coords();
    let mut values = ndarray::Array2::zeros(grid.shape());
    if (s - 1.0).abs() < 1e-12 {
        let gt = g_tilde(g, grid)?;
        for ((i, j), v) in values.indexed_iter_mut() {
            *v = Complex64::cis(-ps[j] * qs[i] / hbar) * gt[j] * phi.values[i];
        }
    } else {
        if (g.ygrid.step() - grid.y_step()).abs() > 1e-12 * grid.y_step() {
            return Err(Error::GridMismatch("g grid step differs from the transform's y step".into()));
        }
        let lt = LatticeTransform::new(grid);
        let interp = phi.interpolator()?;
        let ys = g.ygrid.coords();
        let rows: Result<Vec<Vec<Complex64>>> = qs
            .par_iter()
            .map(|&q| {
                let centre = 2.0 * q / (1.0 + s);
                let mut h = vec![Complex64::new(0.0, 0.0); ys.len()];
                for (k, (&y, gv)) in ys.iter().zip(&g.values).enumerate() {
                    if *gv == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let x = centre + 0.5 * (1.0 - s) * y;
                    let f = interp
                        .eval(x)
                        .ok_or_else(|| Error::Support(format!("φ needed at q = {x} outside its grid")))?;
                    h[k] = gv * f;
                }
                let mut row = lt.to_p(&h, g.ygrid.min());
                for (v, &p) in row.iter_mut().zip(&ps) {
                    *v *= Complex64::cis(-2.0 * p * q / (hbar * (1.0 + s)));
                }
                Ok(row)
            })
            .collect();
        for (i, row) in rows?.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                values[[i, j]] = v;
            }
        }
    }
    Ok(PhaseSpaceWavefunction {
        field: ComplexField2D::new(*grid, SecondAxis::Momentum, values)?,
        convention: Convention::SectionIII,
    })
}

/// `g_s(y) = φ*(-(1+s)y/2)`, the choice for which `ψ_s = 2πħ W_s`.
pub fn wigner_conjugate_g(phi: &PositionWavefunction, s: f64, ygrid: Grid1D) -> Result<GFunction> {
    if (s + 1.0).abs() < 1e-12 {
        return Err(Error::SingularOrdering);
    }
    let interp = phi.interpolator()?;
    let mut values = Vec::with_capacity(ygrid.len());
    for y in ygrid.coords() {
        let x = -0.5 * (1.0 + s) * y;
        let v = interp.eval(x).ok_or_else(|| Error::Support(format!("φ needed at q = {x} outside its grid")))?;
        values.push(v.conj());
    }
    GFunction::new(ygrid, values, s)
}

/// Seeded complex Gaussian mixture, normalized to `∫|g|² = 2/|1+s|`.
pub fn random_gaussian_mixture_g(ygrid: Grid1D, s: f64, terms: usize, seed: u64) -> Result<GFunction> {
    if (s + 1.0).abs() < 1e-12 {
        return Err(Error::SingularOrdering);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts: Vec<(Complex64, f64, f64)> = (0..terms.max(1))
        .map(|_| {
            let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (amp, rng.random_range(-2.0..2.0), rng.random_range(0.8..1.5))
        })
        .collect();
    let g = GFunction::from_fn(ygrid, s, |y| {
        parts.iter().map(|(a, c, w)| a * (-(y - c).powi(2) / (2.0 * w * w)).exp()).sum()
    })?;
    let target = 2.0 / (1.0 + s).abs();
    g.scaled((target / g.norm_sqr()).sqrt())
}
