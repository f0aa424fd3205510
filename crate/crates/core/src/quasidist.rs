//! Quasi-distributions `W_s`, Husimi and Kirkwood–Rihaczek functions, and the
//! operator ↔ symbol (Weyl-type) transforms of the s-ordered family.
//!
//! Conventions: `W_s(q,p) = (1/2πħ) ∫ dy e^{ipy/ħ} ⟨q-(1-s)y/2|ρ̂|q+(1+s)y/2⟩`,
//! normalized over `dq dp`. Operator matrices hold the continuum kernel
//! `⟨q_i|F̂|q_j⟩`, so the identity is `δ_ij / dq`.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    nyquist_energy_fraction, shift_band_limited, ComplexField2D, Grid1D, LatticeTransform, PhaseSpaceGrid, SecondAxis,
};
use crate::kernels::{kernel_transform, Convention, KernelSpec, KernelVariant, PhaseSpaceWavefunction};
use crate::linalg::hermitian_eigen;
use crate::states::{momentum_representation, DensityMatrix, OscillatorUnits, PositionWavefunction};

/// Tolerance of the `∫ W dq dp = 1` invariant.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// Relative spectral energy near Nyquist above which a symbol is rejected.
pub const ALIASING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionSource {
    Pure,
    Mixed,
    /// `|⟨Γ|φ⟩|² / 2πħ`; not a member of the marginal-preserving family.
    Husimi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDistribution {
    pub field: ComplexField2D,
    /// Ordering parameter; `None` for the Husimi function.
    pub s: Option<f64>,
    pub source: DistributionSource,
}

impl QuasiDistribution {
    /// `∫ field dq dp`.
    pub fn normalization(&self) -> Complex64 {
        self.field.values.sum() * self.field.grid.cell_area()
    }

    pub fn check_normalization(&self) -> Result<()> {
        let n = self.normalization();
        if (n - 1.0).norm() > NORMALIZATION_TOL {
            return Err(Error::Normalization(format!("∫W dq dp = {n}")));
        }
        Ok(())
    }

    /// `|ψ(Γ)|² = 2πħ Q(Γ)` for a Husimi distribution.
    pub fn transition_probability(&self) -> Result<Array2<f64>> {
        if self.source != DistributionSource::Husimi {
            return Err(Error::InvalidParameter("transition probability needs a Husimi distribution".into()));
        }
        let scale = 2.0 * PI * self.field.grid.hbar;
        Ok(self.field.values.mapv(|z| z.re * scale))
    }
}

/// `W(q,p) = (1/2πħ) ∫ du e^{-ipu/ħ} φ*(q-u/2) φ(q+u/2)`, with the half-step
/// samples of `φ` taken from an exact 2× band-limited upsampling.
pub fn wigner_from_pure(phi: &PositionWavefunction, grid: &PhaseSpaceGrid) -> Result<QuasiDistribution> {
    check_q_grid(grid, &phi.grid)?;
    let n = phi.grid.len();
    let dq = phi.grid.step();
    let fine = upsample_twice(&phi.values);
    let lt = LatticeTransform::new(grid);
    let scale = 1.0 / (2.0 * PI * grid.hbar);
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let c = 2 * a as i64;
            let reach = c.min(2 * n as i64 - 1 - c);
            let h: Vec<Complex64> =
                (-reach..=reach).map(|k| fine[(c - k) as usize].conj() * fine[(c + k) as usize]).collect();
            lt.to_p(&h, -(reach as f64) * dq).into_iter().map(|z| z * scale).collect()
        })
        .collect();
    let field = field_from_rows(grid, rows)?;
    Ok(QuasiDistribution { field, s: Some(0.0), source: DistributionSource::Pure })
}

/// Trigonometric interpolation onto the grid with half the step.
fn upsample_twice(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut planner = FftPlanner::new();
    let mut coeffs = values.to_vec();
    planner.plan_fft_forward(n).process(&mut coeffs);
    let mut wide = vec![Complex64::new(0.0, 0.0); 2 * n];
    wide[..n / 2].copy_from_slice(&coeffs[..n / 2]);
    wide[3 * n / 2 + 1..].copy_from_slice(&coeffs[n / 2 + 1..]);
    wide[n / 2] = coeffs[n / 2] * 0.5;
    wide[3 * n / 2] = coeffs[n / 2] * 0.5;
    planner.plan_fft_inverse(2 * n).process(&mut wide);
    wide.into_iter().map(|z| z / n as f64).collect()
}

/// `ψ_s(Γ) = ∫ dy e^{-ipy/ħ} φ*(q-(1+s)y/2) φ(q+(1-s)y/2) = 2πħ W_s`.
pub fn psi_s_pure(phi: &PositionWavefunction, s: f64, grid: &PhaseSpaceGrid) -> Result<PhaseSpaceWavefunction> {
    check_q_grid(grid, &phi.grid)?;
    let interp = phi.interpolator()?;
    if !interp.zero_outside() {
        return Err(Error::Support(
            "wavefunction does not vanish at the grid boundary; skewed arguments would be truncated".into(),
        ));
    }
    let lt = LatticeTransform::new(grid);
    let dy = lt.dy();
    let (qmin, qmax) = (phi.grid.min(), phi.grid.max());
    let ca = -0.5 * (1.0 + s);
    let cb = 0.5 * (1.0 - s);
    let rows: Result<Vec<Vec<Complex64>>> = grid
        .qgrid
        .coords()
        .into_par_iter()
        .map(|q| {
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for c in [ca, cb] {
                if c.abs() > 1e-15 {
                    let (u, v) = ((qmin - q) / (c * dy), (qmax - q) / (c * dy));
                    lo = lo.max(u.min(v));
                    hi = hi.min(u.max(v));
                }
            }
            let kmin = (lo - 1e-9).ceil() as i64;
            let kmax = (hi + 1e-9).floor() as i64;
            let mut h = Vec::with_capacity((kmax - kmin + 1).max(0) as usize);
            for k in kmin..=kmax {
                let y = k as f64 * dy;
                let a = interp.eval(q + ca * y).ok_or_else(|| Error::Support("skewed argument".into()))?;
                let b = interp.eval(q + cb * y).ok_or_else(|| Error::Support("skewed argument".into()))?;
                h.push(a.conj() * b);
            }
            Ok(lt.to_p(&h, kmin as f64 * dy))
        })
        .collect();
    Ok(PhaseSpaceWavefunction { field: field_from_rows(grid, rows?)?, convention: Convention::SectionIII })
}

/// `W_s = Σ_r λ_r ψ_s[v_r] / 2πħ` over the eigen-decomposition of `ρ`.
pub fn wigner_s_from_density(rho: &DensityMatrix, s: f64, grid: &PhaseSpaceGrid) -> Result<QuasiDistribution> {
    check_q_grid(grid, &rho.grid)?;
    let components = rho.components(1e-13)?;
    let mut values = Array2::<Complex64>::zeros(grid.shape());
    for (w, v) in &components {
        let psi = psi_s_pure(v, s, grid)?;
        values.scaled_add(Complex64::new(*w / (2.0 * PI * grid.hbar), 0.0), &psi.field.values);
    }
    let source = if components.len() == 1 { DistributionSource::Pure } else { DistributionSource::Mixed };
    Ok(QuasiDistribution { field: ComplexField2D::new(*grid, SecondAxis::Momentum, values)?, s: Some(s), source })
}

/// `K(q,p) = (2πħ)^{-1/2} e^{-ipq/ħ} φ(q) φ̃*(p)`, the `s = 1` member.
pub fn kirkwood_rihaczek(phi: &PositionWavefunction, grid: &PhaseSpaceGrid) -> Result<QuasiDistribution> {
    check_q_grid(grid, &phi.grid)?;
    let phit = momentum_representation(phi, grid.hbar)?;
    if !phit.grid.same_as(&grid.pgrid) {
        return Err(Error::GridMismatch("momentum grid differs from the phase-space p grid".into()));
    }
    let qs = grid.qgrid.coords();
    let ps = grid.pgrid.coords();
    let scale = (2.0 * PI * grid.hbar).sqrt().recip();
    let values = Array2::from_shape_fn(grid.shape(), |(i, j)| {
        Complex64::cis(-ps[j] * qs[i] / grid.hbar) * phi.values[i] * phit.values[j].conj() * scale
    });
    Ok(QuasiDistribution {
        field: ComplexField2D::new(*grid, SecondAxis::Momentum, values)?,
        s: Some(1.0),
        source: DistributionSource::Pure,
    })
}

/// Husimi function `Q(Γ) = |⟨Γ|φ⟩|² / 2πħ` from the coherent-state kernel.
pub fn husimi(phi: &PositionWavefunction, units: &OscillatorUnits, grid: &PhaseSpaceGrid) -> Result<QuasiDistribution> {
    let spec = KernelSpec::new(KernelVariant::CoherentState(*units), *grid)?;
    let psi = kernel_transform(&spec, phi)?;
    let scale = 1.0 / (2.0 * PI * grid.hbar);
    let values = psi.field.values.mapv(|z| Complex64::new(z.norm_sqr() * scale, 0.0));
    Ok(QuasiDistribution {
        field: ComplexField2D::new(*grid, SecondAxis::Momentum, values)?,
        s: None,
        source: DistributionSource::Husimi,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Marginals {
    /// `∫ W dp` on the q grid.
    pub pq: Vec<f64>,
    /// `∫ W dq` on the p grid.
    pub pp: Vec<f64>,
    /// Largest imaginary part among the integrated marginals.
    pub max_imag: f64,
    /// False for the Husimi function, whose marginals are smoothed.
    pub exact: bool,
}

pub fn marginals(w: &QuasiDistribution) -> Marginals {
    let g = w.field.grid;
    let (dq, dp) = (g.qgrid.step(), g.pgrid.step());
    let pq: Vec<Complex64> = w.field.values.rows().into_iter().map(|r| r.sum() * dp).collect();
    let pp: Vec<Complex64> = w.field.values.columns().into_iter().map(|c| c.sum() * dq).collect();
    let max_imag = pq.iter().chain(&pp).fold(0.0f64, |m, z| m.max(z.im.abs()));
    Marginals {
        pq: pq.iter().map(|z| z.re).collect(),
        pp: pp.iter().map(|z| z.re).collect(),
        max_imag,
        exact: w.source != DistributionSource::Husimi,
    }
}

/// `2πħ ∫ W² dq dp`, which equals `Tr ρ²`; only the `s = 0` pairing is self-dual.
pub fn purity_integral(w: &QuasiDistribution) -> Result<f64> {
    match w.s {
        Some(0.0) => {}
        _ => return Err(Error::InvalidParameter("purity integral requires the s = 0 Wigner function".into())),
    }
    let g = w.field.grid;
    let sum: f64 = w.field.values.iter().map(|z| (z * z).re).sum();
    Ok(2.0 * PI * g.hbar * sum * g.cell_area())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Observable,
    Density,
    General,
}

/// Continuum kernel `⟨q_i|F̂|q_j⟩` on a position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub grid: Grid1D,
    pub matrix: Array2<Complex64>,
    pub kind: OperatorKind,
}

impl OperatorMatrix {
    pub fn new(grid: Grid1D, matrix: Array2<Complex64>, kind: OperatorKind) -> Result<Self> {
        let n = grid.len();
        if matrix.dim() != (n, n) {
            return Err(Error::GridMismatch(format!("matrix {:?} on a {n}-point grid", matrix.dim())));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite operator entries".into()));
        }
        Ok(Self { grid, matrix, kind })
    }

    pub fn identity(grid: Grid1D) -> Self {
        Self::diagonal(grid, |_| 1.0)
    }

    /// Multiplication operator `f(q̂)`.
    pub fn diagonal(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let inv = 1.0 / grid.step();
        let mut m = Array2::zeros((grid.len(), grid.len()));
        for (i, q) in grid.coords().into_iter().enumerate() {
            m[[i, i]] = Complex64::new(f(q) * inv, 0.0);
        }
        Self { grid, matrix: m, kind: OperatorKind::Observable }
    }

    pub fn position(grid: Grid1D) -> Self {
        Self::diagonal(grid, |q| q)
    }

    /// `p̂²/2m + V(q̂)` with a spectral kinetic term.
    pub fn hamiltonian(grid: Grid1D, mass: f64, hbar: f64, v: impl Fn(f64) -> f64) -> Self {
        let n = grid.len();
        let length = n as f64 * grid.step();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut op = Self::diagonal(grid, v);
        for j in 0..n {
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            col[j] = Complex64::new(1.0, 0.0);
            fwd.process(&mut col);
            for (m, c) in col.iter_mut().enumerate() {
                let sm = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
                let k = 2.0 * PI * sm / length;
                *c *= hbar * hbar * k * k / (2.0 * mass) / n as f64;
            }
            inv.process(&mut col);
            for (i, c) in col.into_iter().enumerate() {
                op.matrix[[i, j]] += c / grid.step();
            }
        }
        op
    }

    pub fn harmonic(grid: Grid1D, units: &OscillatorUnits) -> Self {
        let k = units.mass * units.omega * units.omega;
        Self::hamiltonian(grid, units.mass, units.hbar, move |q| 0.5 * k * q * q)
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self { grid: rho.grid, matrix: rho.rho.clone(), kind: OperatorKind::Density }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let dq = self.grid.step();
        let h = (&self.matrix + &self.matrix.t().mapv(|z| z.conj())).mapv(|z| z * 0.5 * dq);
        hermitian_eigen(&h).0
    }

    /// The `count` lowest eigenpairs of the Hermitian part, as normalized wavefunctions.
    pub fn eigenstates(&self, count: usize) -> Result<Vec<(f64, PositionWavefunction)>> {
        let dq = self.grid.step();
        let h = (&self.matrix + &self.matrix.t().mapv(|z| z.conj())).mapv(|z| z * 0.5 * dq);
        let (values, vectors) = hermitian_eigen(&h);
        (0..count.min(values.len()))
            .map(|k| {
                let phi = PositionWavefunction::normalized(self.grid, vectors.column(k).to_vec())?;
                Ok((values[k], phi.with_energy(values[k])))
            })
            .collect()
    }

    /// `Tr F̂ = Σ F_ii dq`.
    pub fn trace(&self) -> Complex64 {
        self.matrix.diag().sum() * self.grid.step()
    }

    /// `W_s = f_ρ / 2πħ` for a density operator.
    pub fn to_quasi(&self, s: f64, grid: &PhaseSpaceGrid) -> Result<QuasiDistribution> {
        if self.kind != OperatorKind::Density {
            return Err(Error::InvalidParameter("only density operators map to quasi-distributions".into()));
        }
        let f = operator_to_symbol(self, s, grid)?;
        Ok(QuasiDistribution {
            field: f.scaled(Complex64::new(1.0 / (2.0 * PI * grid.hbar), 0.0)),
            s: Some(s),
            source: DistributionSource::Mixed,
        })
    }
}

/// `Tr(F̂ρ̂) = ∫ W_s f_{-s} dq dp`.
pub fn expectation(w: &QuasiDistribution, f: &OperatorMatrix) -> Result<Complex64> {
    let s = w.s.ok_or_else(|| Error::InvalidParameter("the Husimi function has no dual symbol".into()))?;
    let grid = w.field.grid;
    let sym = operator_to_symbol(f, -s, &grid)?;
    let sum: Complex64 = w.field.values.iter().zip(sym.values.iter()).map(|(a, b)| a * b).sum();
    Ok(sum * grid.cell_area())
}

/// Signed diagonal offsets `m` with `|m| < n/2`, the band kept by the transforms.
/// Diagonal offsets `m ∈ [-n/2, n/2)`; the q index is periodic, so every
/// matrix entry `(i, (i+m) mod n)` belongs to exactly one diagonal.
fn band(n: usize) -> std::ops::Range<i64> {
    -(n as i64 / 2)..(n as i64 / 2)
}

/// `f(q,p) = ∫ dy ⟨q-(1-s)y/2|F̂|q+(1+s)y/2⟩ e^{ipy/ħ}`, with the skew
/// realized as a band-limited shift of each matrix diagonal.
pub fn operator_to_symbol(f: &OperatorMatrix, s: f64, grid: &PhaseSpaceGrid) -> Result<ComplexField2D> {
    check_q_grid(grid, &f.grid)?;
    let n = f.grid.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    // g[m][a] = ⟨x1|F|x1 + m dq⟩ with x1 = q_a - (1-s) m dq / 2
    let diagonals: Vec<Vec<Complex64>> = band(n)
        .into_par_iter()
        .map(|m| {
            let d: Vec<Complex64> =
                (0..n as i64).map(|i| f.matrix[[i as usize, (i + m).rem_euclid(n as i64) as usize]]).collect();
            let delta = -0.5 * (1.0 - s) * m as f64;
            if delta == 0.0 {
                d
            } else {
                shift_band_limited(&d, delta, fwd.as_ref(), inv.as_ref())
            }
        })
        .collect();
    // samples ordered by y' = -y starting at y' = -(n/2 - 1) dy
    let lt = LatticeTransform::new(grid);
    let dy = lt.dy();
    let y0 = -((n / 2 - 1) as f64) * dy;
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let samples: Vec<Complex64> = diagonals.iter().rev().map(|d| d[a]).collect();
            lt.to_p(&samples, y0)
        })
        .collect();
    field_from_rows(grid, rows)
}

/// Inverse of [`operator_to_symbol`]: partial Fourier `p → y`, then un-skew
/// each periodic diagonal.
pub fn symbol_to_operator(f: &ComplexField2D, s: f64) -> Result<OperatorMatrix> {
    if f.axis != SecondAxis::Momentum {
        return Err(Error::GridMismatch("expected a (q,p) symbol".into()));
    }
    let grid = f.grid;
    let n = grid.qgrid.len();
    if grid.pgrid.len() != n {
        return Err(Error::GridMismatch("operator transforms need square grids".into()));
    }
    let lt = LatticeTransform::new(&grid);
    let dy = lt.dy();
    let y0 = -((n / 2 - 1) as f64) * dy;
    // rows[a][k] = G(q_a, y = -(y0 + k dy)); slot n-1 holds m = -n/2
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let row: Vec<Complex64> = f.values.row(a).to_vec();
            lt.to_y(&row, y0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let results: Vec<(i64, Vec<Complex64>, f64, f64)> = band(n)
        .into_par_iter()
        .map(|m| {
            let k = (n as i64 / 2 - 1 - m) as usize;
            let g: Vec<Complex64> = rows.iter().map(|r| r[k]).collect();
            let delta = 0.5 * (1.0 - s) * m as f64;
            if delta == 0.0 {
                (m, g, 0.0, 0.0)
            } else {
                let (high, total) = nyquist_energy_fraction(&g, fwd.as_ref());
                (m, shift_band_limited(&g, delta, fwd.as_ref(), inv.as_ref()), high, total)
            }
        })
        .collect();
    let (high, total) = results.iter().fold((0.0, 0.0), |(h, t), r| (h + r.2, t + r.3));
    let all: f64 = results.iter().map(|r| r.1.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum();
    if total > 0.0 && high > ALIASING_TOL * all.max(total / n as f64) {
        return Err(Error::Aliasing(format!(
            "symbol carries {:.3e} of its energy in the top eighth of the q band",
            high / all.max(f64::MIN_POSITIVE)
        )));
    }
    let mut matrix = Array2::zeros((n, n));
    for (m, d, _, _) in results {
        for (i, v) in d.into_iter().enumerate() {
            matrix[[i, (i as i64 + m).rem_euclid(n as i64) as usize]] = v;
        }
    }
    OperatorMatrix::new(grid.qgrid, matrix, OperatorKind::General)
}

fn check_q_grid(grid: &PhaseSpaceGrid, q: &Grid1D) -> Result<()> {
    if !grid.qgrid.same_as(q) {
        return Err(Error::GridMismatch("position grid differs from the phase-space q grid".into()));
    }
    Ok(())
}

fn field_from_rows(grid: &PhaseSpaceGrid, rows: Vec<Vec<Complex64>>) -> Result<ComplexField2D> {
    let mut values = Array2::zeros(grid.shape());
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            values[[i, j]] = v;
        }
    }
    ComplexField2D::new(*grid, SecondAxis::Momentum, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_phase_grid;
    use crate::states::{density_from_mixture, hermite_eigenstate, laguerre};

    fn desk() -> (PhaseSpaceGrid, OscillatorUnits) {
        (make_phase_grid(256, 16.0, 1.0).unwrap(), OscillatorUnits::default())
    }

    fn laguerre_wigner(n: usize, q: f64, p: f64) -> f64 {
        let h = 0.5 * (q * q + p * p);
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign / PI * laguerre(n, 4.0 * h).unwrap() * (-2.0 * h).exp()
    }

    #[test]
    fn ground_state_wigner() {
        let (grid, u) = desk();
        let phi = hermite_eigenstate(0, &u, &grid.qgrid).unwrap();
        let w = wigner_from_pure(&phi, &grid).unwrap();
        let qs = grid.qgrid.coords();
        let ps = grid.pgrid.coords();
        let err = w
            .field
            .values
            .indexed_iter()
            .fold(0.0f64, |m, ((i, j), z)| m.max((z - (-(qs[i] * qs[i] + ps[j] * ps[j])).exp() / PI).norm()));
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn wigner_matches_laguerre_up_to_five() {
        let (grid, u) = desk();
        let qs = grid.qgrid.coords();
        let ps = grid.pgrid.coords();
        for n in 0..=5 {
            let phi = hermite_eigenstate(n, &u, &grid.qgrid).unwrap();
            let w = wigner_from_pure(&phi, &grid).unwrap();
            let err = w
                .field
                .values
                .indexed_iter()
                .fold(0.0f64, |m, ((i, j), z)| m.max((z - laguerre_wigner(n, qs[i], ps[j])).norm()));
            assert!(err < 1e-6, "n = {n}: {err}");
        }
        let phi1 = hermite_eigenstate(1, &u, &grid.qgrid).unwrap();
        let w1 = wigner_from_pure(&phi1, &grid).unwrap();
        assert!((w1.field.values[[128, 128]].re + 1.0 / PI).abs() < 1e-10);
    }

    #[test]
    fn identity_and_position_symbols() {
        let (grid, _) = desk();
        let one = operator_to_symbol(&OperatorMatrix::identity(grid.qgrid), 0.3, &grid).unwrap();
        assert!(one.values.iter().all(|z| (z - 1.0).norm() < 1e-12));
        let q = operator_to_symbol(&OperatorMatrix::position(grid.qgrid), 0.0, &grid).unwrap();
        let qs = grid.qgrid.coords();
        for ((i, _), z) in q.values.indexed_iter() {
            assert!((z - qs[i]).norm() < 1e-10);
        }
        let back = symbol_to_operator(&one, 0.0).unwrap();
        assert!(back
            .matrix
            .iter()
            .zip(OperatorMatrix::identity(grid.qgrid).matrix.iter())
            .all(|(a, b)| (a - b).norm() < 1e-10));
    }

    #[test]
    fn mixture_purity() {
        let (grid, u) = desk();
        let p0 = hermite_eigenstate(0, &u, &grid.qgrid).unwrap();
        let p1 = hermite_eigenstate(1, &u, &grid.qgrid).unwrap();
        let rho = density_from_mixture(&[(0.5, p0), (0.5, p1)]).unwrap();
        let w = wigner_s_from_density(&rho, 0.0, &grid).unwrap();
        assert!((purity_integral(&w).unwrap() - 0.5).abs() < 1e-6);
        let w_half = wigner_s_from_density(&rho, 0.5, &grid).unwrap();
        assert!(purity_integral(&w_half).is_err());
    }

    #[test]
    fn husimi_peaks_at_coherent_point() {
        let (grid, u) = desk();
        let p0 = grid.pgrid.coord(125);
        let phi = crate::states::coherent_wavefunction(u.gamma(1.0, p0), &u, &grid.qgrid).unwrap();
        let q = husimi(&phi, &u, &grid).unwrap();
        let t = q.transition_probability().unwrap();
        assert!((t[[136, 125]] - 1.0).abs() < 1e-10);
        assert!(t.iter().all(|&v| v <= 1.0 + 1e-10));
        assert!(t.iter().all(|&v| v >= -1e-12));
    }
}
