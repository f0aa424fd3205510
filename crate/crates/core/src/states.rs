//! Position-space states: Hermite functions, coherent states, momentum
//! transforms and density matrices.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BandLimited, Grid1D, LatticeTransform, PhaseSpaceGrid};
use crate::linalg::hermitian_eigen;

/// Largest polynomial order accepted by the recurrences.
pub const MAX_ORDER: usize = 64;

const NORM_TOL: f64 = 1e-8;

/// Laguerre polynomial `L_n(x)` by the three-term recurrence.
pub fn laguerre(n: usize, x: f64) -> Result<f64> {
    if n > MAX_ORDER {
        return Err(Error::InvalidParameter(format!("Laguerre order {n} exceeds {MAX_ORDER}")));
    }
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return Ok(prev);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Normalized Hermite function `ψ_n(x)` in dimensionless `x`, built from the
/// normalized recurrence so that no factorials appear.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = 2f64.sqrt() * x * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Mass, frequency and ħ of a harmonic oscillator with its length scale
/// `λ = sqrt(ħ / mω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorUnits {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
    pub lambda: f64,
}

impl OscillatorUnits {
    pub fn new(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        if !(mass > 0.0 && omega > 0.0 && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("mass {mass}, omega {omega}, hbar {hbar} must be positive")));
        }
        Ok(Self { mass, omega, hbar, lambda: (hbar / (mass * omega)).sqrt() })
    }

    /// Units with a prescribed length scale, choosing `ω = ħ / (m λ²)`.
    pub fn with_lambda(mass: f64, hbar: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda {lambda} must be positive")));
        }
        Self::new(mass, hbar / (mass * lambda * lambda), hbar)
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.hbar * self.omega * (n as f64 + 0.5)
    }

    /// Coherent-state label `Γ = (q/λ + iλp/ħ)/√2`.
    pub fn gamma(&self, q: f64, p: f64) -> Complex64 {
        Complex64::new(q / self.lambda, self.lambda * p / self.hbar) / 2f64.sqrt()
    }

    /// Phase-space point `(q, p)` of a coherent-state label.
    pub fn phase_point(&self, gamma: Complex64) -> (f64, f64) {
        (2f64.sqrt() * self.lambda * gamma.re, 2f64.sqrt() * self.hbar * gamma.im / self.lambda)
    }

    /// Classical oscillator energy `p²/2m + mω²q²/2`.
    pub fn classical_energy(&self, q: f64, p: f64) -> f64 {
        p * p / (2.0 * self.mass) + 0.5 * self.mass * self.omega * self.omega * q * q
    }
}

impl Default for OscillatorUnits {
    fn default() -> Self {
        Self { mass: 1.0, omega: 1.0, hbar: 1.0, lambda: 1.0 }
    }
}

/// Complex samples of `φ(q)` with unit L² norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionWavefunction {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
    /// Eigen-energy when the state is a known eigenstate.
    pub energy: Option<f64>,
}

impl PositionWavefunction {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} samples on a {}-point grid", values.len(), grid.len())));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite wavefunction samples".into()));
        }
        let psi = Self { grid, values, energy: None };
        let norm = psi.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization(format!("squared norm {norm} is not 1")));
        }
        Ok(psi)
    }

    /// Rescales arbitrary samples to unit norm.
    pub fn normalized(grid: Grid1D, mut values: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = values.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.step();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroFunction);
        }
        let scale = norm.sqrt().recip();
        values.iter_mut().for_each(|z| *z *= scale);
        Self::new(grid, values)
    }

    pub fn with_energy(mut self, energy: f64) -> Self {
        self.energy = Some(energy);
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.step()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PositionWavefunction) -> Result<Complex64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch("inner product across grids".into()));
        }
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.step())
    }

    pub fn interpolator(&self) -> Result<BandLimited> {
        BandLimited::new(self.grid, &self.values)
    }

    pub fn conj(&self) -> Self {
        Self { values: self.values.iter().map(|z| z.conj()).collect(), ..self.clone() }
    }
}

fn half_extent(grid: &Grid1D) -> f64 {
    (-grid.min()).min(grid.max() + grid.step())
}

/// `n`-th oscillator eigenstate sampled on `grid`, energy attached.
pub fn hermite_eigenstate(n: usize, units: &OscillatorUnits, grid: &Grid1D) -> Result<PositionWavefunction> {
    if n > MAX_ORDER {
        return Err(Error::InvalidParameter(format!("order {n} exceeds {MAX_ORDER}")));
    }
    let needed = units.lambda * 2.0 * ((2 * n + 1) as f64).sqrt();
    if half_extent(grid) < needed {
        return Err(Error::Support(format!(
            "grid half-extent {} is below {needed} required for n = {n}",
            half_extent(grid)
        )));
    }
    // the state must also be resolved in momentum
    let p_needed = units.hbar / units.lambda * 2.0 * ((2 * n + 1) as f64).sqrt();
    let p_nyquist = PI * units.hbar / grid.step();
    if p_nyquist < p_needed {
        return Err(Error::Support(format!("momentum Nyquist {p_nyquist} is below {p_needed} required for n = {n}")));
    }
    let scale = units.lambda.sqrt().recip();
    let values =
        grid.coords().iter().map(|&q| Complex64::new(scale * hermite_function(n, q / units.lambda), 0.0)).collect();
    Ok(PositionWavefunction::new(*grid, values)?.with_energy(units.energy(n)))
}

/// Samples of `⟨q'|Γ⟩ = (λ²π)^{-1/4} exp{-(q'-q)²/2λ² + ip(q'-q)/ħ}`.
pub fn coherent_wavefunction(gamma: Complex64, units: &OscillatorUnits, grid: &Grid1D) -> Result<PositionWavefunction> {
    let (q0, p0) = units.phase_point(gamma);
    let lam = units.lambda;
    let reach = 7.0 * lam;
    if q0 - reach < grid.min() || q0 + reach > grid.max() {
        return Err(Error::Support(format!("coherent state centred at q = {q0} leaves the grid")));
    }
    let p_nyquist = PI * units.hbar / grid.step();
    if p0.abs() + 7.0 * units.hbar / lam > p_nyquist {
        return Err(Error::Support(format!("coherent state momentum {p0} exceeds grid resolution")));
    }
    let norm = (lam * lam * PI).powf(-0.25);
    let values = grid
        .coords()
        .iter()
        .map(|&x| {
            let d = x - q0;
            norm * Complex64::new(-d * d / (2.0 * lam * lam), p0 * d / units.hbar).exp()
        })
        .collect();
    PositionWavefunction::new(*grid, values)
}

/// `φ̃(p) = (2πħ)^{-1/2} ∫ φ(q) e^{-ipq/ħ} dq` on the Fourier-partner grid.
pub fn momentum_representation(phi: &PositionWavefunction, hbar: f64) -> Result<PositionWavefunction> {
    let n = phi.grid.len();
    let dp = 2.0 * PI * hbar / (n as f64 * phi.grid.step());
    let pgrid = Grid1D::new(n, -(n as f64 / 2.0) * dp, dp)?;
    let grid = PhaseSpaceGrid::new(phi.grid, pgrid, hbar)?;
    let lt = LatticeTransform::new(&grid);
    let scale = (2.0 * PI * hbar).sqrt().recip();
    let values = lt.to_p(&phi.values, phi.grid.min()).into_iter().map(|z| z * scale).collect();
    PositionWavefunction::new(pgrid, values)
}

/// Sampled density matrix `⟨q_i|ρ̂|q_j⟩`; the identity operator is `δ_ij / dq`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub grid: Grid1D,
    pub rho: Array2<Complex64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(grid: Grid1D, rho: Array2<Complex64>) -> Result<Self> {
        let n = grid.len();
        if rho.dim() != (n, n) {
            return Err(Error::GridMismatch(format!("matrix {:?} on a {n}-point grid", rho.dim())));
        }
        let scale = rho.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1.0);
        for i in 0..n {
            for j in 0..=i {
                if (rho[[i, j]] - rho[[j, i]].conj()).norm() > 1e-12 * scale {
                    return Err(Error::InvalidParameter(format!("not Hermitian at ({i},{j})")));
                }
            }
        }
        let dm = Self { grid, rho };
        let tr = dm.trace();
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization(format!("trace {tr} is not 1")));
        }
        let (evals, _) = dm.spectrum();
        if let Some(&min) = evals.first() {
            if min < -NORM_TOL {
                return Err(Error::InvalidParameter(format!("negative eigenvalue {min}")));
            }
        }
        Ok(dm)
    }

    pub fn trace(&self) -> f64 {
        self.rho.diag().iter().map(|z| z.re).sum::<f64>() * self.grid.step()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let dq = self.grid.step();
        self.rho.iter().map(|z| z.norm_sqr()).sum::<f64>() * dq * dq
    }

    /// Eigenvalues (ascending) of the operator and its eigenfunctions as
    /// columns normalized to `Σ|v|² dq = 1`.
    pub fn spectrum(&self) -> (Vec<f64>, Array2<Complex64>) {
        let dq = self.grid.step();
        let (vals, mut vecs) = hermitian_eigen(&self.rho.mapv(|z| z * dq));
        vecs.mapv_inplace(|z| z / dq.sqrt());
        (vals, vecs)
    }

    /// Weighted pure components `(w_r, φ_r)` with `w_r` above `cutoff`.
    pub fn components(&self, cutoff: f64) -> Result<Vec<(f64, PositionWavefunction)>> {
        let (vals, vecs) = self.spectrum();
        let mut out = Vec::new();
        for (r, &w) in vals.iter().enumerate().rev() {
            if w > cutoff {
                let phi = PositionWavefunction::normalized(self.grid, vecs.column(r).to_vec())?;
                out.push((w, phi));
            }
        }
        Ok(out)
    }

    pub fn pure(phi: &PositionWavefunction) -> Result<Self> {
        density_from_mixture(&[(1.0, phi.clone())])
    }
}

/// `ρ = Σ w_k |φ_k⟩⟨φ_k|`.
pub fn density_from_mixture(components: &[(f64, PositionWavefunction)]) -> Result<DensityMatrix> {
    let first = components.first().ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
    let grid = first.1.grid;
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    if components.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) {
        return Err(Error::InvalidParameter("mixture weights must be non-negative".into()));
    }
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("mixture weights sum to {total}")));
    }
    let n = grid.len();
    let mut rho = Array2::<Complex64>::zeros((n, n));
    for (w, phi) in components {
        if !phi.grid.same_as(&grid) {
            return Err(Error::GridMismatch("mixture components on different grids".into()));
        }
        for i in 0..n {
            let a = phi.values[i] * *w;
            for j in 0..n {
                rho[[i, j]] += a * phi.values[j].conj();
            }
        }
    }
    // restore exact hermiticity lost to rounding
    for i in 0..n {
        rho[[i, i]].im = 0.0;
        for j in 0..i {
            let avg = (rho[[i, j]] + rho[[j, i]].conj()) * 0.5;
            rho[[i, j]] = avg;
            rho[[j, i]] = avg.conj();
        }
    }
    DensityMatrix::new(grid, rho)
}
