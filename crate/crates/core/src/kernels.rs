//! Integral kernels `K(Γ; q')` mapping position wavefunctions to
//! phase-space wavefunctions `ψ(Γ) = ∫ K(Γ; q') φ(q') dq'`.
//!
//! Two coordinate conventions coexist and are never mixed:
//!
//! - [`Convention::SectionII`]: coherent-state, Bargmann and `g`-kernels with
//!   `K_g(q,p;q') = e^{-ip(q'-q/2)/ħ} g(q'-q)` and `∫|g|² = 1`;
//! - [`Convention::SectionIII`]: the s-family with
//!   `K^s_g(q,p;q') = 2/|1-s| · g_s(2q'/(1-s) - 4q/(1-s²)) · e^{-2ip(q'-q)/ħ(1-s)}`
//!   and `∫|g_s|² = 2/|1+s|`.
//!
//! Transforms run on the separable fast path (one lattice Fourier sum per
//! q-row); dense kernel arrays are only built for small grids, as a
//! cross-check.

use std::f64::consts::PI;

use ndarray::{Array2, Array3, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BandLimited, ComplexField2D, Grid1D, LatticeTransform, PhaseSpaceGrid, SecondAxis};
use crate::solutions;
use crate::states::{OscillatorUnits, PositionWavefunction};

/// Largest grid for which dense `n³` kernel arrays are materialized.
pub const DENSE_LIMIT: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    SectionII,
    SectionIII,
}

/// The arbitrary nonzero function `g(y)` (or `g_s(y)`) of a kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct GFunction {
    pub ygrid: Grid1D,
    pub values: Vec<Complex64>,
    /// Ordering parameter the function is meant for; sets the norm target.
    pub target_s: f64,
}

impl GFunction {
    pub fn new(ygrid: Grid1D, values: Vec<Complex64>, target_s: f64) -> Result<Self> {
        if values.len() != ygrid.len() {
            return Err(Error::GridMismatch(format!("{} samples on a {}-point grid", values.len(), ygrid.len())));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite g samples".into()));
        }
        let g = Self { ygrid, values, target_s };
        if !(g.norm_sqr() > 0.0) {
            return Err(Error::ZeroFunction);
        }
        Ok(g)
    }

    pub fn from_fn(ygrid: Grid1D, target_s: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = ygrid.coords().into_iter().map(f).collect();
        Self::new(ygrid, values, target_s)
    }

    /// `g(y) = (πλ²)^{-1/4} e^{-y²/2λ²}`, unit norm.
    pub fn gaussian(lambda: f64, ygrid: Grid1D) -> Result<Self> {
        let norm = (PI * lambda * lambda).powf(-0.25);
        Self::from_fn(ygrid, 0.0, |y| Complex64::new(norm * (-y * y / (2.0 * lambda * lambda)).exp(), 0.0))
    }

    /// `∫ |g|² dy`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.ygrid.step()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.ygrid, self.values.iter().map(|z| z * factor).collect(), self.target_s)
    }

    pub fn interpolator(&self) -> Result<BandLimited> {
        BandLimited::new(self.ygrid, &self.values)
    }
}

/// Real gauge phase `f(Γ)` for `K → e^{i f(Γ)} K`.
#[derive(Debug, Clone, PartialEq)]
pub enum GaugePhase {
    /// `f(q,p) = c · q p / ħ`; `c = -1/2` is the symmetric gauge.
    Bilinear(f64),
    /// Arbitrary real samples over the phase-space grid.
    Sampled(Array2<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelVariant {
    CoherentState(OscillatorUnits),
    Bargmann(OscillatorUnits),
    GeneralG(GFunction),
    SFamily { g: GFunction, s: f64 },
    Gauged { base: Box<KernelVariant>, phase: GaugePhase },
}

impl KernelVariant {
    pub fn convention(&self) -> Convention {
        match self {
            KernelVariant::SFamily { .. } => Convention::SectionIII,
            KernelVariant::Gauged { base, .. } => base.convention(),
            _ => Convention::SectionII,
        }
    }

    fn is_bargmann(&self) -> bool {
        match self {
            KernelVariant::Bargmann(_) => true,
            KernelVariant::Gauged { base, .. } => base.is_bargmann(),
            _ => false,
        }
    }
}

/// Declarative kernel description on a phase-space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub variant: KernelVariant,
    pub grid: PhaseSpaceGrid,
}

impl KernelSpec {
    pub fn new(variant: KernelVariant, grid: PhaseSpaceGrid) -> Result<Self> {
        let spec = Self { variant, grid };
        spec.validate(&spec.variant)?;
        Ok(spec)
    }

    fn validate(&self, v: &KernelVariant) -> Result<()> {
        match v {
            KernelVariant::SFamily { s, .. } if (*s + 1.0).abs() < 1e-12 => Err(Error::SingularOrdering),
            KernelVariant::Gauged { base, phase } => {
                if let GaugePhase::Sampled(a) = phase {
                    if a.dim() != self.grid.shape() {
                        return Err(Error::GridMismatch("gauge phase shape".into()));
                    }
                }
                self.validate(base)
            }
            _ => Ok(()),
        }
    }

    pub fn convention(&self) -> Convention {
        self.variant.convention()
    }

    /// The symmetric-gauge coherent kernel `e^{-ipq/2ħ} K_CS`.
    pub fn symmetric_coherent(units: OscillatorUnits, grid: PhaseSpaceGrid) -> Result<Self> {
        Self::new(
            KernelVariant::Gauged {
                base: Box::new(KernelVariant::CoherentState(units)),
                phase: GaugePhase::Bilinear(-0.5),
            },
            grid,
        )
    }

    /// Parses a `key = value` description (`#` starts a comment):
    ///
    /// ```text
    /// variant = s-family   # coherent | bargmann | gaussian-g | s-family
    /// s = 0.5
    /// lambda = 1.0
    /// gauge = symmetric    # none | symmetric | bilinear:<c>
    /// g_scale = 1.0        # amplitude factor applied to the Gaussian g
    /// ```
    ///
    /// `g`-kernels use the Gaussian `g`, normalized to the unitarity target of
    /// their convention before `g_scale` is applied.
    pub fn from_config_str(text: &str, grid: PhaseSpaceGrid, mass: f64) -> Result<Self> {
        let mut variant = None;
        let mut s = 0.0;
        let mut lambda = 1.0;
        let mut gauge = None;
        let mut g_scale = 1.0;
        let number =
            |key: &str, v: &str| v.parse::<f64>().map_err(|_| Error::Config(format!("{key}: '{v}' is not a number")));
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "variant" => variant = Some(value.to_string()),
                "s" => s = number(key, value)?,
                "lambda" => lambda = number(key, value)?,
                "g_scale" => g_scale = number(key, value)?,
                "gauge" => {
                    gauge = match value {
                        "none" => None,
                        "symmetric" => Some(GaugePhase::Bilinear(-0.5)),
                        other => match other.strip_prefix("bilinear:") {
                            Some(c) => Some(GaugePhase::Bilinear(number(key, c)?)),
                            None => return Err(Error::Config(format!("unknown gauge '{other}'"))),
                        },
                    }
                }
                other => return Err(Error::Config(format!("unknown key '{other}'"))),
            }
        }
        let units = OscillatorUnits::with_lambda(mass, grid.hbar, lambda)?;
        let base = match variant.as_deref() {
            Some("coherent") => KernelVariant::CoherentState(units),
            Some("bargmann") => KernelVariant::Bargmann(units),
            Some("gaussian-g") => {
                KernelVariant::GeneralG(GFunction::gaussian(lambda, grid.y_lattice(2)?)?.scaled(g_scale)?)
            }
            Some("s-family") => {
                if (s + 1.0).abs() < 1e-12 {
                    return Err(Error::SingularOrdering);
                }
                let target = (2.0 / (1.0 + s).abs()).sqrt();
                let mut g = GFunction::gaussian(lambda, grid.y_lattice(2)?)?.scaled(target * g_scale)?;
                g.target_s = s;
                KernelVariant::SFamily { g, s }
            }
            Some(other) => return Err(Error::Config(format!("unknown variant '{other}'"))),
            None => return Err(Error::Config("missing 'variant'".into())),
        };
        let variant = match gauge {
            Some(phase) => KernelVariant::Gauged { base: Box::new(base), phase },
            None => base,
        };
        Self::new(variant, grid)
    }

    /// `φ_Γ(q') = K*(Γ; q')` at grid point `(q_i, p_j)`.
    pub fn transition_state(&self, i: usize, j: usize) -> Result<Vec<Complex64>> {
        let ev = Evaluator::new(&self.variant, &self.grid)?;
        let q = self.grid.qgrid.coord(i);
        let p = self.grid.pgrid.coord(j);
        self.grid.qgrid.coords().iter().map(|&x| ev.value(q, p, i, j, x).map(|z| z.conj())).collect()
    }
}

/// Pointwise closed-form kernel values.
struct Evaluator<'a> {
    variant: &'a KernelVariant,
    grid: &'a PhaseSpaceGrid,
    g: Option<BandLimited>,
    base: Option<Box<Evaluator<'a>>>,
}

impl<'a> Evaluator<'a> {
    fn new(variant: &'a KernelVariant, grid: &'a PhaseSpaceGrid) -> Result<Self> {
        let (g, base) = match variant {
            KernelVariant::GeneralG(g) | KernelVariant::SFamily { g, .. } => (Some(g.interpolator()?), None),
            KernelVariant::Gauged { base, .. } => (None, Some(Box::new(Evaluator::new(base, grid)?))),
            _ => (None, None),
        };
        Ok(Self { variant, grid, g, base })
    }

    fn g_at(&self, y: f64) -> Result<Complex64> {
        self.g
            .as_ref()
            .and_then(|g| g.eval(y))
            .ok_or_else(|| Error::Support(format!("g(y) needed at y = {y} outside its grid")))
    }

    /// Log-space value used by the Bargmann kernel, optionally weighted by `e^{-|z|²/2}`.
    fn bargmann(units: &OscillatorUnits, q: f64, p: f64, x: f64, weighted: bool) -> Complex64 {
        let z = units.gamma(q, p);
        let xi = x / units.lambda;
        let mut expo = -(z * z + xi * xi) * 0.5 + z * (2f64.sqrt() * xi);
        if weighted {
            expo -= z.norm_sqr() * 0.5;
        }
        expo.exp() * (units.lambda * units.lambda * PI).powf(-0.25)
    }

    fn value_weighted(&self, q: f64, p: f64, i: usize, j: usize, x: f64, weighted: bool) -> Result<Complex64> {
        let hbar = self.grid.hbar;
        Ok(match self.variant {
            KernelVariant::CoherentState(u) => {
                let d = x - q;
                (u.lambda * u.lambda * PI).powf(-0.25)
                    * Complex64::new(-d * d / (2.0 * u.lambda * u.lambda), -p * d / hbar).exp()
            }
            KernelVariant::Bargmann(u) => Self::bargmann(u, q, p, x, weighted),
            KernelVariant::GeneralG(_) => self.g_at(x - q)? * Complex64::cis(-p * (x - 0.5 * q) / hbar),
            KernelVariant::SFamily { s, .. } => {
                let s = *s;
                if (s - 1.0).abs() < 1e-12 {
                    return Err(Error::InvalidParameter(
                        "the s = 1 kernel contains δ(q - q') and has no pointwise value".into(),
                    ));
                }
                let y = 2.0 * x / (1.0 - s) - 4.0 * q / (1.0 - s * s);
                self.g_at(y)? * (2.0 / (1.0 - s).abs()) * Complex64::cis(-2.0 * p * (x - q) / (hbar * (1.0 - s)))
            }
            KernelVariant::Gauged { phase, .. } => {
                let f = match phase {
                    GaugePhase::Bilinear(c) => c * q * p / hbar,
                    GaugePhase::Sampled(a) => a[[i, j]],
                };
                self.base.as_ref().expect("gauged evaluator").value_weighted(q, p, i, j, x, weighted)?
                    * Complex64::cis(f)
            }
        })
    }

    fn value(&self, q: f64, p: f64, i: usize, j: usize, x: f64) -> Result<Complex64> {
        self.value_weighted(q, p, i, j, x, false)
    }
}

/// Sampled kernel: dense `[q][p][q']` array, or the `s = 1` operator
/// `ψ(q,p) = e^{-ipq/ħ} g̃(p) φ(q)` stored as its multiplier field.
#[derive(Debug, Clone)]
pub enum SampledKernel {
    Dense { grid: PhaseSpaceGrid, values: Array3<Complex64> },
    DiagonalFourier { grid: PhaseSpaceGrid, factor: Array2<Complex64> },
}

impl SampledKernel {
    /// Applies the sampled kernel by direct quadrature.
    pub fn apply(&self, phi: &PositionWavefunction) -> Result<Array2<Complex64>> {
        match self {
            SampledKernel::Dense { grid, values } => {
                check_phi_grid(grid, phi)?;
                let dq = phi.grid.step();
                let (nq, np, _) = values.dim();
                let mut out = Array2::zeros((nq, np));
                for i in 0..nq {
                    for j in 0..np {
                        let s: Complex64 =
                            values.index_axis(Axis(0), i).row(j).iter().zip(&phi.values).map(|(k, f)| k * f).sum();
                        out[[i, j]] = s * dq;
                    }
                }
                Ok(out)
            }
            SampledKernel::DiagonalFourier { grid, factor } => {
                check_phi_grid(grid, phi)?;
                let mut out = factor.clone();
                for (i, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
                    row.mapv_inplace(|z| z * phi.values[i]);
                }
                Ok(out)
            }
        }
    }
}

fn check_phi_grid(grid: &PhaseSpaceGrid, phi: &PositionWavefunction) -> Result<()> {
    if !phi.grid.same_as(&grid.qgrid) {
        return Err(Error::GridMismatch("wavefunction grid differs from the kernel's q grid".into()));
    }
    Ok(())
}

/// `g̃(p) = ∫ g(y) e^{-ipy/ħ} dy` on the momentum grid.
pub(crate) fn g_tilde(g: &GFunction, grid: &PhaseSpaceGrid) -> Result<Vec<Complex64>> {
    if (g.ygrid.step() - grid.y_step()).abs() > 1e-12 * grid.y_step() {
        return Err(Error::GridMismatch("g grid step differs from the transform's y step".into()));
    }
    Ok(LatticeTransform::new(grid).to_p(&g.values, g.ygrid.min()))
}

/// Materializes the kernel. Dense arrays are refused above [`DENSE_LIMIT`].
pub fn build_kernel(spec: &KernelSpec) -> Result<SampledKernel> {
    let grid = spec.grid;
    // a gauge phase depends on Γ only and cancels in K̄K
    let mut variant = &spec.variant;
    while let KernelVariant::Gauged { base, .. } = variant {
        variant = base;
    }
    if let KernelVariant::SFamily { g, s } = variant {
        if (s - 1.0).abs() < 1e-12 {
            let gt = g_tilde(g, &grid)?;
            let qs = grid.qgrid.coords();
            let ps = grid.pgrid.coords();
            let factor =
                Array2::from_shape_fn(grid.shape(), |(i, j)| Complex64::cis(-ps[j] * qs[i] / grid.hbar) * gt[j]);
            return Ok(SampledKernel::DiagonalFourier { grid, factor });
        }
    }
    let (nq, np) = grid.shape();
    if nq > DENSE_LIMIT || np > DENSE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "dense kernel refused above n = {DENSE_LIMIT}; use kernel_transform"
        )));
    }
    let ev = Evaluator::new(&spec.variant, &grid)?;
    let qs = grid.qgrid.coords();
    let ps = grid.pgrid.coords();
    let mut values = Array3::zeros((nq, np, nq));
    for i in 0..nq {
        for j in 0..np {
            for (k, &x) in qs.iter().enumerate() {
                values[[i, j, k]] = ev.value(qs[i], ps[j], i, j, x)?;
            }
        }
    }
    Ok(SampledKernel::Dense { grid, values })
}

/// `ψ(Γ)` on the phase-space grid with its convention tag.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceWavefunction {
    pub field: ComplexField2D,
    pub convention: Convention,
}

impl PhaseSpaceWavefunction {
    /// `∫ |ψ|² dΓ`.
    pub fn norm_sqr(&self) -> f64 {
        let area = self.field.grid.cell_area() / (2.0 * PI * self.field.grid.hbar);
        self.field.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * area
    }

    /// `⟨self|other⟩` in the dΓ inner product; conventions must agree.
    pub fn inner(&self, other: &PhaseSpaceWavefunction) -> Result<Complex64> {
        if self.convention != other.convention {
            return Err(Error::Convention("inner product across conventions".into()));
        }
        self.field.check_same_grid(&other.field)?;
        let area = self.field.grid.cell_area() / (2.0 * PI * self.field.grid.hbar);
        let s: Complex64 = self.field.values.iter().zip(other.field.values.iter()).map(|(a, b)| a.conj() * b).sum();
        Ok(s * area)
    }
}

/// Row-wise evaluation of `Σ_k a(q, q'_k) φ_k e^{-i c p (q'_k - q0(q))/ħ} dq'`.
fn separable_rows(
    grid: &PhaseSpaceGrid,
    phi: &PositionWavefunction,
    q_eval: impl Fn(f64) -> f64 + Sync,
    amplitude: impl Fn(f64, f64) -> Result<Complex64> + Sync,
    reversed: bool,
) -> Result<Array2<Complex64>> {
    let lt = LatticeTransform::new(grid);
    let xs = phi.grid.coords();
    let qs = grid.qgrid.coords();
    let rows: Result<Vec<Vec<Complex64>>> = qs
        .par_iter()
        .map(|&q| {
            let qe = q_eval(q);
            let mut h = Vec::with_capacity(xs.len());
            for (x, f) in xs.iter().zip(&phi.values) {
                h.push(amplitude(qe, *x)? * f);
            }
            if reversed {
                h.reverse();
                Ok(lt.to_p(&h, -phi.grid.max()))
            } else {
                Ok(lt.to_p(&h, phi.grid.min() - qe))
            }
        })
        .collect();
    let rows = rows?;
    let mut out = Array2::zeros(grid.shape());
    for (i, r) in rows.into_iter().enumerate() {
        for (j, v) in r.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

fn apply_gauge(values: &mut Array2<Complex64>, grid: &PhaseSpaceGrid, phase: &GaugePhase, scale: f64) -> Result<()> {
    let qs = grid.qgrid.coords();
    let ps = grid.pgrid.coords();
    for ((i, j), v) in values.indexed_iter_mut() {
        let f = match phase {
            GaugePhase::Bilinear(c) => c * scale * scale * qs[i] * ps[j] / grid.hbar,
            GaugePhase::Sampled(a) => {
                if scale != 1.0 {
                    return Err(Error::Convention("a sampled gauge phase cannot be rescaled".into()));
                }
                a[[i, j]]
            }
        };
        *v *= Complex64::cis(f);
    }
    Ok(())
}

fn transform_variant(
    variant: &KernelVariant,
    grid: &PhaseSpaceGrid,
    phi: &PositionWavefunction,
    scale: f64,
) -> Result<Array2<Complex64>> {
    let hbar = grid.hbar;
    let with_p_scale = |mut a: Array2<Complex64>, extra: &dyn Fn(f64, f64) -> Complex64| {
        let qs = grid.qgrid.coords();
        let ps = grid.pgrid.coords();
        for ((i, j), v) in a.indexed_iter_mut() {
            *v *= extra(qs[i], ps[j]);
        }
        a
    };
    match variant {
        KernelVariant::CoherentState(u) => {
            let norm = (u.lambda * u.lambda * PI).powf(-0.25);
            let lam2 = u.lambda * u.lambda;
            let rows = scaled_rows(grid, phi, scale, move |q, x| {
                let d = x - q;
                Ok(Complex64::new(norm * (-d * d / (2.0 * lam2)).exp(), 0.0))
            })?;
            Ok(rows)
        }
        KernelVariant::GeneralG(g) => {
            let gi = g.interpolator()?;
            let rows = scaled_rows(grid, phi, scale, move |q, x| {
                gi.eval(x - q).ok_or_else(|| Error::Support(format!("g needed at {} outside its grid", x - q)))
            })?;
            Ok(with_p_scale(rows, &|q, p| Complex64::cis(-(scale * p) * (scale * q) / (2.0 * hbar))))
        }
        KernelVariant::Bargmann(u) => {
            if scale != 1.0 {
                return Err(Error::Convention("Bargmann functions are not rescaled".into()));
            }
            let lam = u.lambda;
            let norm = (lam * lam * PI).powf(-0.25);
            let rows = separable_rows(
                grid,
                phi,
                |q| q,
                move |q, x| {
                    let xi = x / lam;
                    Ok(Complex64::new((-0.5 * xi * xi + q * xi / lam).exp(), 0.0))
                },
                true,
            )?;
            let u = *u;
            Ok(with_p_scale(rows, &move |q, p| norm * (-(u.gamma(q, p).powi(2)) * 0.5).exp()))
        }
        KernelVariant::SFamily { g, s } => {
            if scale != 1.0 {
                return Err(Error::Convention("s-family kernels are already in the rescaled convention".into()));
            }
            Ok(solutions::solve_section3(phi, g, *s, grid)?.field.values)
        }
        KernelVariant::Gauged { base, phase } => {
            let mut v = transform_variant(base, grid, phi, scale)?;
            apply_gauge(&mut v, grid, phase, scale)?;
            Ok(v)
        }
    }
}

/// Coherent-type rows `Σ_k a(q,q'_k) φ_k e^{-i(σp)(q'_k - σq)/ħ} dq'` evaluated at
/// `(σq, σp)` for `σ = scale ∈ {1, 2}`.
fn scaled_rows(
    grid: &PhaseSpaceGrid,
    phi: &PositionWavefunction,
    scale: f64,
    amplitude: impl Fn(f64, f64) -> Result<Complex64> + Sync,
) -> Result<Array2<Complex64>> {
    if scale == 1.0 {
        return separable_rows(grid, phi, |q| q, amplitude, false);
    }
    let factor = scale.round() as usize;
    if (scale - factor as f64).abs() > 0.0 || factor == 0 {
        return Err(Error::InvalidParameter("only integer coordinate scales are supported".into()));
    }
    let lt = LatticeTransform::new(grid);
    let xs = phi.grid.coords();
    let qs = grid.qgrid.coords();
    let ps = grid.pgrid.coords();
    let band = PI * grid.hbar / phi.grid.step();
    let rows: Result<Vec<Vec<Complex64>>> = qs
        .par_iter()
        .map(|&q| {
            let qe = scale * q;
            let mut h = Vec::with_capacity(xs.len());
            for (x, f) in xs.iter().zip(&phi.values) {
                h.push(amplitude(qe, *x)? * f);
            }
            let mut row = lt.to_p_scaled(&h, phi.grid.min() - qe, factor);
            // band-limited samples have no spectrum beyond the Nyquist momentum
            for (v, p) in row.iter_mut().zip(&ps) {
                if (scale * p).abs() >= band {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
            Ok(row)
        })
        .collect();
    let rows = rows?;
    let mut out = Array2::zeros(grid.shape());
    for (i, r) in rows.into_iter().enumerate() {
        for (j, v) in r.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// `ψ(Γ) = ∫ K(Γ; q') φ(q') dq'` on the fast separable path. The s-family
/// routes through the general solution (see [`solutions::solve_section3`]).
pub fn kernel_transform(spec: &KernelSpec, phi: &PositionWavefunction) -> Result<PhaseSpaceWavefunction> {
    check_phi_grid(&spec.grid, phi)?;
    let values = transform_variant(&spec.variant, &spec.grid, phi, 1.0)?;
    Ok(PhaseSpaceWavefunction {
        field: ComplexField2D::new(spec.grid, SecondAxis::Momentum, values)?,
        convention: spec.convention(),
    })
}

/// `SectionII` transform evaluated at `(2q, 2p)`, i.e. re-expressed in the
/// s-family coordinates where `H ⋆ ψ = Eψ` takes the `s = 0` form.
pub fn kernel_transform_rescaled(spec: &KernelSpec, phi: &PositionWavefunction) -> Result<PhaseSpaceWavefunction> {
    if spec.convention() != Convention::SectionII {
        return Err(Error::Convention("only SectionII kernels are rescaled".into()));
    }
    check_phi_grid(&spec.grid, phi)?;
    let values = transform_variant(&spec.variant, &spec.grid, phi, 2.0)?;
    Ok(PhaseSpaceWavefunction {
        field: ComplexField2D::new(spec.grid, SecondAxis::Momentum, values)?,
        convention: Convention::SectionIII,
    })
}

/// Direct `O(n³)` quadrature with the closed-form kernel (cross-check only).
pub fn kernel_transform_direct(spec: &KernelSpec, phi: &PositionWavefunction) -> Result<PhaseSpaceWavefunction> {
    let values = build_kernel(spec)?.apply(phi)?;
    Ok(PhaseSpaceWavefunction {
        field: ComplexField2D::new(spec.grid, SecondAxis::Momentum, values)?,
        convention: spec.convention(),
    })
}

/// Measure used by [`check_kernel_unitarity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitarityMeasure {
    /// `dΓ = dq dp / 2πħ`.
    DGamma,
    /// `dμ(z) = π^{-1} e^{-|z|²} d²z` of the Bargmann–Segal space.
    Bargmann,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitarityReport {
    /// `max |dq · ∫K̄(Γ;q')K(Γ;q'')dμ - δ_{q'q''}|` over the probe set.
    pub residual: f64,
    /// Mean diagonal value `dq · ∫|K(Γ;q')|² dμ`; 1 for a unitary kernel.
    pub diagonal_factor: f64,
    pub probes: usize,
}

/// Deterministic probe pairs `(i, j)`: diagonal entries across the central
/// half of the grid plus near and far off-diagonal neighbours.
fn probe_pairs(n: usize) -> Vec<(usize, usize)> {
    let centres = [n / 4 + n / 16, 3 * n / 8, n / 2, 5 * n / 8, 3 * n / 4 - n / 16];
    let mut pairs = Vec::new();
    for &a in &centres {
        pairs.push((a, a));
        for off in [1, 3, n / 16] {
            if a + off < n {
                pairs.push((a, a + off));
            }
        }
    }
    pairs
}

/// Discretized check of `∫ K̄(Γ;q') K(Γ;q'') dΓ = δ(q'-q'')` with the delta
/// realized as `1/dq` at coincident indices.
pub fn check_kernel_unitarity(spec: &KernelSpec, measure: UnitarityMeasure) -> Result<UnitarityReport> {
    let grid = spec.grid;
    let bargmann = spec.variant.is_bargmann();
    match (bargmann, measure) {
        (true, UnitarityMeasure::DGamma) | (false, UnitarityMeasure::Bargmann) => {
            return Err(Error::InvalidParameter(
                "Bargmann kernels pair with the Bargmann measure, all others with dΓ".into(),
            ))
        }
        _ => {}
    }
    // a gauge phase depends on Γ only and cancels in K̄K
    let mut variant = &spec.variant;
    while let KernelVariant::Gauged { base, .. } = variant {
        variant = base;
    }
    if let KernelVariant::SFamily { g, s } = variant {
        // p-integral done analytically: ∫dΓ K̄K = δ(q'-q'') · |1+s|/2 · ∫|g_s|²
        let factor = if (s - 1.0).abs() < 1e-12 {
            let gt = g_tilde(g, &grid)?;
            gt.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.pgrid.step() / (2.0 * PI * grid.hbar)
        } else {
            0.5 * (1.0 + s).abs() * g.norm_sqr()
        };
        return Ok(UnitarityReport { residual: (factor - 1.0).abs(), diagonal_factor: factor, probes: 1 });
    }
    let n = grid.qgrid.len();
    let pairs = probe_pairs(n);
    let mut needed: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    needed.sort_unstable();
    needed.dedup();
    let ev = Evaluator::new(variant, &grid)?;
    let qs = grid.qgrid.coords();
    let ps = grid.pgrid.coords();
    let weighted = measure == UnitarityMeasure::Bargmann;
    let columns: Result<Vec<(usize, Array2<Complex64>)>> = needed
        .par_iter()
        .map(|&k| {
            let x = qs[k];
            let mut col = Array2::zeros(grid.shape());
            for i in 0..n {
                for j in 0..ps.len() {
                    col[[i, j]] = ev.value_weighted(qs[i], ps[j], i, j, x, weighted)?;
                }
            }
            Ok((k, col))
        })
        .collect();
    let columns = columns?;
    let lookup = |k: usize| &columns.iter().find(|(idx, _)| *idx == k).expect("probe column").1;
    let dgamma = grid.cell_area() / (2.0 * PI * grid.hbar);
    let dq = grid.qgrid.step();
    let mut residual = 0.0f64;
    let mut diag_sum = 0.0;
    let mut diag_count = 0;
    for &(a, b) in &pairs {
        let s: Complex64 = lookup(a).iter().zip(lookup(b).iter()).map(|(x, y)| x.conj() * y).sum();
        let value = s * dgamma * dq;
        let target = if a == b { 1.0 } else { 0.0 };
        residual = residual.max((value - target).norm());
        if a == b {
            diag_sum += value.re;
            diag_count += 1;
        }
    }
    Ok(UnitarityReport { residual, diagonal_factor: diag_sum / diag_count as f64, probes: pairs.len() })
}

/// `|∫|g|² dy - target|` with target 1 (`SectionII`) or `2/|1+s|` (`SectionIII`).
pub fn g_norm_residual(g: &GFunction, convention: Convention) -> Result<f64> {
    let norm = g.norm_sqr();
    if !(norm > 0.0) {
        return Err(Error::ZeroFunction);
    }
    let target = match convention {
        Convention::SectionII => 1.0,
        Convention::SectionIII => {
            if (g.target_s + 1.0).abs() < 1e-12 {
                return Err(Error::SingularOrdering);
            }
            2.0 / (1.0 + g.target_s).abs()
        }
    };
    Ok((norm - target).abs())
}

/// `ψ'(Γ) = e^{i f(Γ)} ψ(Γ)` for a real phase field `f`.
pub fn gauge_transform(psi: &PhaseSpaceWavefunction, f: &ComplexField2D) -> Result<PhaseSpaceWavefunction> {
    psi.field.check_same_grid(f)?;
    if f.values.iter().any(|z| z.im != 0.0) {
        return Err(Error::InvalidParameter("gauge phase must be real".into()));
    }
    let mut out = psi.clone();
    out.field.values.zip_mut_with(&f.values, |v, phase| *v *= Complex64::cis(phase.re));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_phase_grid;
    use crate::states::hermite_eigenstate;

    fn setup(n: usize, hw: f64) -> (PhaseSpaceGrid, OscillatorUnits) {
        (make_phase_grid(n, hw, 1.0).unwrap(), OscillatorUnits::default())
    }

    #[test]
    fn coherent_kernel_peak() {
        let (grid, u) = setup(16, 4.0);
        let spec = KernelSpec::new(KernelVariant::CoherentState(u), grid).unwrap();
        let ev = Evaluator::new(&spec.variant, &grid).unwrap();
        assert!((ev.value(0.0, 0.0, 8, 8, 0.0).unwrap().re - PI.powf(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn gaussian_g_kernel_is_gauged_coherent() {
        let (grid, u) = setup(32, 6.0);
        let g = GFunction::gaussian(1.0, grid.y_lattice(2).unwrap()).unwrap();
        let kg = build_kernel(&KernelSpec::new(KernelVariant::GeneralG(g), grid).unwrap()).unwrap();
        let kc = build_kernel(&KernelSpec::symmetric_coherent(u, grid).unwrap()).unwrap();
        let (SampledKernel::Dense { values: a, .. }, SampledKernel::Dense { values: b, .. }) = (kg, kc) else {
            panic!("dense kernels expected")
        };
        let d = a.iter().zip(b.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn dense_kernel_refused_for_large_grids() {
        let (grid, u) = setup(256, 16.0);
        let spec = KernelSpec::new(KernelVariant::CoherentState(u), grid).unwrap();
        assert!(build_kernel(&spec).is_err());
    }

    #[test]
    fn s_minus_one_is_rejected() {
        let (grid, _) = setup(32, 6.0);
        let g = GFunction::gaussian(1.0, grid.ygrid()).unwrap();
        assert!(matches!(KernelSpec::new(KernelVariant::SFamily { g, s: -1.0 }, grid), Err(Error::SingularOrdering)));
    }

    #[test]
    fn g_norm_targets() {
        let (grid, _) = setup(256, 16.0);
        let g = GFunction::gaussian(1.0, grid.ygrid()).unwrap();
        assert!(g_norm_residual(&g, Convention::SectionII).unwrap() < 1e-10);
        let phi0 = hermite_eigenstate(0, &OscillatorUnits::default(), &grid.qgrid).unwrap();
        let ygrid = grid.y_lattice(2).unwrap();
        let gs = GFunction::from_fn(ygrid, 0.0, |y| Complex64::new(crate::states::hermite_function(0, -y / 2.0), 0.0))
            .unwrap();
        assert!((gs.norm_sqr() - 2.0).abs() < 1e-8);
        assert!(g_norm_residual(&gs, Convention::SectionIII).unwrap() < 1e-8);
        let singular = GFunction { target_s: -1.0, ..gs };
        assert!(g_norm_residual(&singular, Convention::SectionIII).is_err());
        assert!(GFunction::new(phi0.grid, vec![Complex64::new(0.0, 0.0); 256], 0.0).is_err());
    }

    #[test]
    fn gauge_identity_and_rejection() {
        let (grid, u) = setup(64, 8.0);
        let phi = hermite_eigenstate(1, &u, &grid.qgrid).unwrap();
        let spec = KernelSpec::new(KernelVariant::CoherentState(u), grid).unwrap();
        let psi = kernel_transform(&spec, &phi).unwrap();
        let zero = ComplexField2D::zeros(grid);
        assert_eq!(gauge_transform(&psi, &zero).unwrap(), psi);
        let complex = ComplexField2D::from_fn(grid, |_, _| Complex64::new(0.0, 1.0));
        assert!(gauge_transform(&psi, &complex).is_err());
    }
}
