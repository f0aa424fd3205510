//! Uniform grids, the partial Fourier transform between the auxiliary
//! coordinate `y` and momentum `p`, quadrature, and band-limited helpers.
//!
//! The canonical transform is
//!
//! ```text
//! f(q, p) = ∫ χ(q, y) e^{-i p y / ħ} dy
//! ```
//!
//! evaluated as a lattice sum. Because `dp · dy · n = 2πħ`, the phase
//! `e^{-2πi jk/n}` is periodic in the lattice index, so samples on any
//! stretch of the y-lattice (longer than one period included) are folded
//! into `n` bins and handled by a single FFT. Grid offsets enter as explicit
//! multiplicative phases.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FOURIER_TOL: f64 = 1e-10;

/// Uniform 1-D grid `min + k·step`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n: usize,
    min: f64,
    step: f64,
}

impl Grid1D {
    pub fn new(n: usize, min: f64, step: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("sample count {n} must be a power of two >= 8")));
        }
        if !(step > 0.0) || !step.is_finite() || !min.is_finite() {
            return Err(Error::InvalidGrid(format!("step {step} must be positive and min {min} finite")));
        }
        Ok(Self { n, min, step })
    }

    /// Grid on `[-halfwidth, halfwidth)`.
    pub fn symmetric(n: usize, halfwidth: f64) -> Result<Self> {
        if !(halfwidth > 0.0) || !halfwidth.is_finite() {
            return Err(Error::InvalidGrid(format!("halfwidth {halfwidth} must be positive")));
        }
        Self::new(n, -halfwidth, 2.0 * halfwidth / n as f64)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Last sample coordinate.
    pub fn max(&self) -> f64 {
        self.coord(self.n - 1)
    }

    pub fn coord(&self, k: usize) -> f64 {
        self.min + k as f64 * self.step
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.coord(k)).collect()
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.n == other.n
            && (self.min - other.min).abs() <= 1e-12 * (1.0 + self.min.abs())
            && (self.step - other.step).abs() <= 1e-12 * self.step
    }
}

/// Phase-space grid over `Γ = (q, p)` with `dp · dq · n_q = 2πħ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub qgrid: Grid1D,
    pub pgrid: Grid1D,
    pub hbar: f64,
}

impl PhaseSpaceGrid {
    pub fn new(qgrid: Grid1D, pgrid: Grid1D, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidGrid(format!("hbar {hbar} must be positive")));
        }
        let product = pgrid.step * qgrid.step * qgrid.n as f64;
        let target = 2.0 * PI * hbar;
        if (product - target).abs() > FOURIER_TOL * target {
            return Err(Error::InvalidGrid(format!("dp·dq·n = {product} is not 2πħ = {target}")));
        }
        Ok(Self { qgrid, pgrid, hbar })
    }

    /// The auxiliary `y` grid paired with `p` by the partial transform.
    pub fn ygrid(&self) -> Grid1D {
        let n = self.pgrid.n;
        let dy = self.y_step();
        Grid1D { n, min: -(n as f64 / 2.0) * dy, step: dy }
    }

    /// Centered y-lattice with `factor` times as many points as [`Self::ygrid`].
    pub fn y_lattice(&self, factor: usize) -> Result<Grid1D> {
        let n = self.pgrid.n * factor.max(1);
        let dy = self.y_step();
        Grid1D::new(n, -(n as f64 / 2.0) * dy, dy)
    }

    pub fn y_step(&self) -> f64 {
        2.0 * PI * self.hbar / (self.pgrid.n as f64 * self.pgrid.step)
    }

    pub fn cell_area(&self) -> f64 {
        self.qgrid.step * self.pgrid.step
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.qgrid.n, self.pgrid.n)
    }

    pub fn same_as(&self, other: &PhaseSpaceGrid) -> bool {
        self.qgrid.same_as(&other.qgrid)
            && self.pgrid.same_as(&other.pgrid)
            && (self.hbar - other.hbar).abs() <= 1e-14 * self.hbar
    }
}

/// Symmetric phase-space grid with the p-spacing fixed by Fourier consistency.
pub fn make_phase_grid(n: usize, q_halfwidth: f64, hbar: f64) -> Result<PhaseSpaceGrid> {
    let qgrid = Grid1D::symmetric(n, q_halfwidth)?;
    if !(hbar > 0.0) || !hbar.is_finite() {
        return Err(Error::InvalidGrid(format!("hbar {hbar} must be positive")));
    }
    let dp = 2.0 * PI * hbar / (n as f64 * qgrid.step);
    let pgrid = Grid1D::new(n, -(n as f64 / 2.0) * dp, dp)?;
    PhaseSpaceGrid::new(qgrid, pgrid, hbar)
}

/// Meaning of the second array axis of a [`ComplexField2D`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SecondAxis {
    /// Momentum `p` on `grid.pgrid`.
    Momentum,
    /// Auxiliary coordinate `y` on `grid.ygrid()`.
    Auxiliary,
}

/// Complex samples indexed `[q-index][p-index]` (or `[q][y]`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    pub grid: PhaseSpaceGrid,
    pub axis: SecondAxis,
    pub values: Array2<Complex64>,
}

impl ComplexField2D {
    pub fn new(grid: PhaseSpaceGrid, axis: SecondAxis, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::GridMismatch(format!("values {:?} do not match grid {:?}", values.dim(), grid.shape())));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("field has non-finite entries".into()));
        }
        Ok(Self { grid, axis, values })
    }

    pub fn zeros(grid: PhaseSpaceGrid) -> Self {
        Self { grid, axis: SecondAxis::Momentum, values: Array2::zeros(grid.shape()) }
    }

    /// Samples `f(q, p)` over the phase-space grid.
    pub fn from_fn(grid: PhaseSpaceGrid, f: impl Fn(f64, f64) -> Complex64 + Sync) -> Self {
        let qs = grid.qgrid.coords();
        let ps = grid.pgrid.coords();
        let mut values = Array2::zeros(grid.shape());
        values.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(i, mut row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(qs[i], ps[j]);
            }
        });
        Self { grid, axis: SecondAxis::Momentum, values }
    }

    pub fn from_real_fn(grid: PhaseSpaceGrid, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        Self::from_fn(grid, |q, p| Complex64::new(f(q, p), 0.0))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { values: self.values.mapv(|z| z * factor), ..self.clone() }
    }

    /// Euclidean norm of the samples (no measure).
    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &ComplexField2D) -> f64 {
        self.values.iter().zip(other.values.iter()).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub(crate) fn check_same_grid(&self, other: &ComplexField2D) -> Result<()> {
        if !self.grid.same_as(&other.grid) || self.axis != other.axis {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }
}

/// Integration measure over phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    /// Plain `dq dp`.
    DqDp,
    /// Dimensionless `dΓ = dq dp / 2πħ`.
    DGamma,
}

/// Riemann sum of `f` over the grid; spectrally accurate for fields that
/// decay before the grid edges.
pub fn integrate_phase(f: &ComplexField2D, measure: Measure) -> Result<Complex64> {
    if f.axis != SecondAxis::Momentum {
        return Err(Error::GridMismatch("integrate_phase expects a (q,p) field".into()));
    }
    let sum: Complex64 = f.values.iter().sum();
    if !sum.re.is_finite() || !sum.im.is_finite() {
        return Err(Error::InvalidParameter("non-finite integrand".into()));
    }
    let area = f.grid.cell_area();
    Ok(match measure {
        Measure::DqDp => sum * area,
        Measure::DGamma => sum * area / (2.0 * PI * f.grid.hbar),
    })
}

/// FFT-backed evaluator of `Σ_k s_k e^{-i p_j y_k/ħ} dy` for samples on the
/// y-lattice `y_k = y0 + k·dy`, at every `p_j` of the momentum grid.
#[derive(Clone)]
pub(crate) struct LatticeTransform {
    n: usize,
    p_min: f64,
    dp: f64,
    dy: f64,
    hbar: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl LatticeTransform {
    pub fn new(grid: &PhaseSpaceGrid) -> Self {
        let n = grid.pgrid.len();
        let mut planner = FftPlanner::new();
        Self {
            n,
            p_min: grid.pgrid.min(),
            dp: grid.pgrid.step(),
            dy: grid.y_step(),
            hbar: grid.hbar,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    /// Lattice sum over any number of samples starting at `y0`.
    pub fn to_p(&self, samples: &[Complex64], y0: f64) -> Vec<Complex64> {
        let n = self.n;
        let mut bins = vec![Complex64::new(0.0, 0.0); n];
        let w = -self.p_min * self.dy / self.hbar;
        for (k, s) in samples.iter().enumerate() {
            if *s != Complex64::new(0.0, 0.0) {
                bins[k % n] += s * Complex64::cis(w * k as f64);
            }
        }
        self.forward.process(&mut bins);
        for (j, b) in bins.iter_mut().enumerate() {
            let p = self.p_min + j as f64 * self.dp;
            *b *= Complex64::cis(-p * y0 / self.hbar) * self.dy;
        }
        bins
    }

    /// `f_j = Σ_k s_k e^{-i c p_j y_k/ħ} dy` for an integer frequency scale `c`.
    pub fn to_p_scaled(&self, samples: &[Complex64], y0: f64, c: usize) -> Vec<Complex64> {
        if c == 1 {
            return self.to_p(samples, y0);
        }
        let n = self.n;
        let cf = c as f64;
        let mut bins = vec![Complex64::new(0.0, 0.0); n];
        let w = -cf * self.p_min * self.dy / self.hbar;
        for (k, s) in samples.iter().enumerate() {
            if *s != Complex64::new(0.0, 0.0) {
                bins[k % n] += s * Complex64::cis(w * k as f64);
            }
        }
        self.forward.process(&mut bins);
        (0..n)
            .map(|j| {
                let p = self.p_min + j as f64 * self.dp;
                bins[(c * j) % n] * Complex64::cis(-cf * p * y0 / self.hbar) * self.dy
            })
            .collect()
    }

    /// Exact inverse of [`Self::to_p`] for exactly `n` samples.
    pub fn to_y(&self, values: &[Complex64], y0: f64) -> Vec<Complex64> {
        let n = self.n;
        let mut buf: Vec<Complex64> = values
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let p = self.p_min + j as f64 * self.dp;
                f * Complex64::cis(p * y0 / self.hbar)
            })
            .collect();
        self.inverse.process(&mut buf);
        let scale = 1.0 / (n as f64 * self.dy);
        let w = self.p_min * self.dy / self.hbar;
        for (k, b) in buf.iter_mut().enumerate() {
            *b *= Complex64::cis(w * k as f64) * scale;
        }
        buf
    }
}

/// `f(q,p) = ∫ χ(q,y) e^{-ipy/ħ} dy` row by row.
pub fn partial_fourier_y_to_p(chi: &ComplexField2D) -> Result<ComplexField2D> {
    if chi.axis != SecondAxis::Auxiliary {
        return Err(Error::GridMismatch("expected a (q,y) field".into()));
    }
    Ok(ComplexField2D { grid: chi.grid, axis: SecondAxis::Momentum, values: y_to_p_rows(&chi.grid, &chi.values) })
}

/// Inverse of [`partial_fourier_y_to_p`].
pub fn partial_fourier_p_to_y(f: &ComplexField2D) -> Result<ComplexField2D> {
    if f.axis != SecondAxis::Momentum {
        return Err(Error::GridMismatch("expected a (q,p) field".into()));
    }
    Ok(ComplexField2D { grid: f.grid, axis: SecondAxis::Auxiliary, values: p_to_y_rows(&f.grid, &f.values) })
}

pub(crate) fn y_to_p_rows(grid: &PhaseSpaceGrid, values: &Array2<Complex64>) -> Array2<Complex64> {
    let lt = LatticeTransform::new(grid);
    let y0 = grid.ygrid().min();
    map_rows(values, |row| lt.to_p(row, y0))
}

pub(crate) fn p_to_y_rows(grid: &PhaseSpaceGrid, values: &Array2<Complex64>) -> Array2<Complex64> {
    let lt = LatticeTransform::new(grid);
    let y0 = grid.ygrid().min();
    map_rows(values, |row| lt.to_y(row, y0))
}

pub(crate) fn map_rows(
    values: &Array2<Complex64>,
    f: impl Fn(&[Complex64]) -> Vec<Complex64> + Sync,
) -> Array2<Complex64> {
    let mut out = Array2::zeros(values.dim());
    out.axis_iter_mut(Axis(0)).into_par_iter().zip(values.axis_iter(Axis(0)).into_par_iter()).for_each(
        |(mut dst, src)| {
            let src: Vec<Complex64> = src.to_vec();
            for (d, v) in dst.iter_mut().zip(f(&src)) {
                *d = v;
            }
        },
    );
    out
}

/// Signed FFT frequency index for bin `m` of an `n`-point transform.
fn signed_index(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Spectral `∂/∂q` of every column (Nyquist mode dropped).
pub(crate) fn spectral_dq(values: &Array2<Complex64>, dq: f64) -> Array2<Complex64> {
    let (nq, np) = values.dim();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(nq);
    let inv = planner.plan_fft_inverse(nq);
    let length = nq as f64 * dq;
    let columns: Vec<Vec<Complex64>> = (0..np)
        .into_par_iter()
        .map(|j| {
            let mut col: Vec<Complex64> = values.column(j).to_vec();
            fwd.process(&mut col);
            for (m, c) in col.iter_mut().enumerate() {
                if m == nq / 2 {
                    *c = Complex64::new(0.0, 0.0);
                } else {
                    let k = 2.0 * PI * signed_index(m, nq) as f64 / length;
                    *c *= Complex64::new(0.0, k / nq as f64);
                }
            }
            inv.process(&mut col);
            col
        })
        .collect();
    let mut out = Array2::zeros((nq, np));
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    out
}

/// Periodic band-limited shift `g(x) = f(x + delta·step)` of uniformly
/// sampled data. The Nyquist mode is shifted as a cosine so real data stays real.
pub(crate) fn shift_band_limited(
    data: &[Complex64],
    delta_steps: f64,
    fwd: &dyn Fft<f64>,
    inv: &dyn Fft<f64>,
) -> Vec<Complex64> {
    let n = data.len();
    let mut buf = data.to_vec();
    fwd.process(&mut buf);
    for (m, c) in buf.iter_mut().enumerate() {
        let factor = if m == n / 2 {
            Complex64::new((PI * delta_steps).cos(), 0.0)
        } else {
            Complex64::cis(2.0 * PI * signed_index(m, n) as f64 * delta_steps / n as f64)
        };
        *c *= factor / n as f64;
    }
    inv.process(&mut buf);
    buf
}

/// Fraction of spectral energy in the top eighth of the band.
pub(crate) fn nyquist_energy_fraction(data: &[Complex64], fwd: &dyn Fft<f64>) -> (f64, f64) {
    let n = data.len();
    let mut buf = data.to_vec();
    fwd.process(&mut buf);
    let cutoff = (n / 2) as i64 * 7 / 8;
    let mut high = 0.0;
    let mut total = 0.0;
    for (m, c) in buf.iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        if signed_index(m, n).abs() >= cutoff {
            high += e;
        }
    }
    (high, total)
}

/// Trigonometric (band-limited) interpolant of samples on a [`Grid1D`].
///
/// Outside the sampled interval the function is zero when its boundary
/// samples are below `1e-12`; otherwise evaluation there is refused.
#[derive(Debug, Clone)]
pub struct BandLimited {
    grid: Grid1D,
    samples: Vec<Complex64>,
    coeffs: Vec<Complex64>,
    zero_outside: bool,
}

pub const BOUNDARY_ZERO_TOL: f64 = 1e-12;

impl BandLimited {
    pub fn new(grid: Grid1D, samples: &[Complex64]) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} samples for a {}-point grid", samples.len(), grid.len())));
        }
        let n = grid.len();
        let mut coeffs = samples.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut coeffs);
        for c in coeffs.iter_mut() {
            *c /= n as f64;
        }
        let boundary = samples[0].norm().max(samples[n - 1].norm());
        Ok(Self { grid, samples: samples.to_vec(), coeffs, zero_outside: boundary < BOUNDARY_ZERO_TOL })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Whether the padding policy allows treating the function as zero off-grid.
    pub fn zero_outside(&self) -> bool {
        self.zero_outside
    }

    /// Value at `x`; `None` when `x` is off-grid and padding is not allowed.
    pub fn eval(&self, x: f64) -> Option<Complex64> {
        let n = self.grid.len();
        let t = (x - self.grid.min()) / self.grid.step();
        if t < -1e-9 || t > (n - 1) as f64 + 1e-9 {
            return if self.zero_outside { Some(Complex64::new(0.0, 0.0)) } else { None };
        }
        let nearest = t.round();
        if (t - nearest).abs() < 1e-10 {
            return Some(self.samples[(nearest as usize).min(n - 1)]);
        }
        let z = Complex64::cis(2.0 * PI * t / n as f64);
        let zc = z.conj();
        let mut zp = Complex64::new(1.0, 0.0);
        let mut zm = Complex64::new(1.0, 0.0);
        let mut acc = self.coeffs[0];
        for m in 1..n / 2 {
            zp *= z;
            zm *= zc;
            acc += self.coeffs[m] * zp + self.coeffs[n - m] * zm;
        }
        acc += self.coeffs[n / 2] * (PI * t).cos();
        Some(acc)
    }
}
