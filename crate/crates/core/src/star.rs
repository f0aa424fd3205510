//! The s-ordered star product.
//!
//! For `H = p²/2m + V(q)` the product with a sampled field is evaluated
//! exactly in the mixed `(q, y)` representation, where `iħ∂_p` acts as
//! multiplication by `y`:
//!
//! - left: `H ⋆_s f = H(q + (1-s)(iħ/2)∂_p, p - (1+s)(iħ/2)∂_q) f`
//! - right: `f ⋆_s H = H(q - (1+s)(iħ/2)∂_p, p + (1-s)(iħ/2)∂_q) f`
//!
//! [`PolySymbol`] and [`star_poly`] give the exact finite series for
//! polynomial symbols, generic over `f64` and exact rationals.

use std::collections::BTreeMap;
use std::fmt::Debug;

use ndarray::Array2;
use num_complex::{Complex, Complex64};
use num_traits::{Num, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{p_to_y_rows, spectral_dq, y_to_p_rows, ComplexField2D, Grid1D, PhaseSpaceGrid, SecondAxis};
use crate::states::OscillatorUnits;

/// Highest total degree a [`PolySymbol`] may carry.
pub const MAX_DEGREE: u32 = 8;

/// Fraction of each axis excluded from residual norms at either edge.
pub const EDGE_MASK: f64 = 0.1;

const LAGRANGE_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Potential {
    /// `V(q) = Σ_k c_k q^k`.
    Polynomial(Vec<f64>),
    /// Samples on a grid; evaluated by local Lagrange interpolation, never extrapolated.
    Sampled { grid: Grid1D, values: Vec<f64> },
}

impl Potential {
    pub fn eval(&self, x: f64) -> Option<f64> {
        match self {
            Potential::Polynomial(c) => Some(c.iter().rev().fold(0.0, |acc, ck| acc * x + ck)),
            Potential::Sampled { grid, values } => {
                let t = (x - grid.min()) / grid.step();
                let n = values.len();
                if t < -1e-9 || t > (n - 1) as f64 + 1e-9 {
                    return None;
                }
                let nearest = t.round();
                if (t - nearest).abs() < 1e-12 {
                    return Some(values[(nearest as usize).min(n - 1)]);
                }
                let m = LAGRANGE_POINTS.min(n);
                let start = (t.floor() as i64 - (m as i64 / 2 - 1)).clamp(0, (n - m) as i64) as usize;
                let mut acc = 0.0;
                for (a, va) in values.iter().enumerate().skip(start).take(m) {
                    let mut w = 1.0;
                    for b in start..start + m {
                        if a != b {
                            w *= (t - b as f64) / (a as f64 - b as f64);
                        }
                    }
                    acc += w * va;
                }
                Some(acc)
            }
        }
    }
}

/// `H(q,p) = p²/2m + V(q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub mass: f64,
    pub potential: Potential,
}

impl HamiltonianSpec {
    pub fn new(mass: f64, potential: Potential) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass {mass} must be positive")));
        }
        match &potential {
            Potential::Polynomial(c) if c.iter().any(|x| !x.is_finite()) => {
                return Err(Error::InvalidParameter("non-finite potential coefficient".into()))
            }
            Potential::Sampled { grid, values } => {
                if values.len() != grid.len() {
                    return Err(Error::GridMismatch("potential samples do not match their grid".into()));
                }
                if values.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter("non-finite potential sample".into()));
                }
            }
            _ => {}
        }
        Ok(Self { mass, potential })
    }

    pub fn harmonic(units: &OscillatorUnits) -> Self {
        let k = units.mass * units.omega * units.omega;
        Self { mass: units.mass, potential: Potential::Polynomial(vec![0.0, 0.0, 0.5 * k]) }
    }

    /// The classical symbol sampled on the grid.
    pub fn symbol(&self, grid: &PhaseSpaceGrid) -> Result<ComplexField2D> {
        let qs = grid.qgrid.coords();
        let v: Vec<f64> = qs
            .iter()
            .map(|&q| self.potential.eval(q).ok_or_else(|| Error::Support(format!("V needed at {q}"))))
            .collect::<Result<_>>()?;
        let ps = grid.pgrid.coords();
        let values =
            Array2::from_shape_fn(grid.shape(), |(i, j)| Complex64::new(ps[j] * ps[j] / (2.0 * self.mass) + v[i], 0.0));
        ComplexField2D::new(*grid, SecondAxis::Momentum, values)
    }

    /// The symbol as a polynomial, when `V` is polynomial.
    pub fn to_poly(&self) -> Option<Result<PolySymbol<f64>>> {
        let Potential::Polynomial(c) = &self.potential else { return None };
        let build = || {
            let mut h = PolySymbol::monomial(0, 2, Complex64::new(0.5 / self.mass, 0.0))?;
            for (k, ck) in c.iter().enumerate() {
                if *ck != 0.0 {
                    h = h.add(&PolySymbol::monomial(k as u32, 0, Complex64::new(*ck, 0.0))?);
                }
            }
            Ok(h)
        };
        Some(build())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

fn star_apply(h: &HamiltonianSpec, f: &ComplexField2D, s: f64, side: Side) -> Result<ComplexField2D> {
    if f.axis != SecondAxis::Momentum {
        return Err(Error::GridMismatch("star products act on (q,p) fields".into()));
    }
    let grid = f.grid;
    let hbar = grid.hbar;
    let (shift, c) = match side {
        Side::Left => (0.5 * (1.0 - s), -(1.0 + s)),
        Side::Right => (-0.5 * (1.0 + s), 1.0 - s),
    };

    let mut chi = p_to_y_rows(&grid, &f.values);
    let qs = grid.qgrid.coords();
    let ys = grid.ygrid().coords();
    let floor = chi.iter().fold(0.0f64, |m, z| m.max(z.norm())) * 1e-14;
    for ((a, k), z) in chi.indexed_iter_mut() {
        let x = qs[a] + shift * ys[k];
        match h.potential.eval(x) {
            Some(v) => *z *= v,
            None if z.norm() <= floor => *z = Complex64::new(0.0, 0.0),
            None => return Err(Error::Support(format!("V needed at shifted argument {x} outside its grid"))),
        }
    }
    let mut out = y_to_p_rows(&grid, &chi);

    let ps = grid.pgrid.coords();
    let dq = grid.qgrid.step();
    let momentum = |g: &Array2<Complex64>| {
        let d = spectral_dq(g, dq);
        let k = Complex64::new(0.0, 0.5 * c * hbar);
        Array2::from_shape_fn(g.dim(), |(i, j)| ps[j] * g[[i, j]] + k * d[[i, j]])
    };
    let kinetic = momentum(&momentum(&f.values));
    out.scaled_add(Complex64::new(0.5 / h.mass, 0.0), &kinetic);
    ComplexField2D::new(grid, SecondAxis::Momentum, out)
}

/// `H ⋆_s f`.
pub fn star_apply_left(h: &HamiltonianSpec, f: &ComplexField2D, s: f64) -> Result<ComplexField2D> {
    star_apply(h, f, s, Side::Left)
}

/// `f ⋆_s H`.
pub fn star_apply_right(h: &HamiltonianSpec, f: &ComplexField2D, s: f64) -> Result<ComplexField2D> {
    star_apply(h, f, s, Side::Right)
}

/// Relative residuals of `H ⋆_s f = E f` and `f ⋆_s H = E f`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub s: f64,
    /// Quantum number of the tested state, when known.
    pub n: Option<usize>,
    #[serde(rename = "E")]
    pub energy: f64,
    pub left: f64,
    pub right: f64,
    pub grid: PhaseSpaceGrid,
    /// Fraction of each axis masked at either edge.
    pub mask: f64,
}

fn interior_norm(values: &Array2<Complex64>) -> f64 {
    let (nq, np) = values.dim();
    let (a0, a1) = ((nq as f64 * EDGE_MASK) as usize, nq - (nq as f64 * EDGE_MASK) as usize);
    let (b0, b1) = ((np as f64 * EDGE_MASK) as usize, np - (np as f64 * EDGE_MASK) as usize);
    let mut acc = 0.0;
    for i in a0..a1 {
        for j in b0..b1 {
            acc += values[[i, j]].norm_sqr();
        }
    }
    acc.sqrt()
}

/// `‖H⋆f - Ef‖ / ‖Ef‖` and its right-hand twin over the masked interior.
pub fn eigen_residuals(h: &HamiltonianSpec, f: &ComplexField2D, energy: f64, s: f64) -> Result<ResidualReport> {
    let scale = interior_norm(&f.values) * energy.abs();
    if !(scale > 0.0) {
        return Err(Error::ZeroFunction);
    }
    let relative = |g: ComplexField2D| {
        let mut d = g.values;
        d.scaled_add(Complex64::new(-energy, 0.0), &f.values);
        interior_norm(&d) / scale
    };
    let left = relative(star_apply_left(h, f, s)?);
    let right = relative(star_apply_right(h, f, s)?);
    Ok(ResidualReport { s, n: None, energy, left, right, grid: f.grid, mask: EDGE_MASK })
}

/// Real scalar used for polynomial coefficients (`f64` or an exact rational).
pub trait Scalar: Num + Clone + PartialEq + Debug {}
impl<T: Num + Clone + PartialEq + Debug> Scalar for T {}

fn from_count<R: Scalar>(n: u64) -> R {
    (0..n).fold(R::zero(), |acc, _| acc + R::one())
}

fn falling<R: Scalar>(from: u32, k: u32) -> R {
    (0..k).fold(R::one(), |acc, t| acc * from_count::<R>((from - t) as u64))
}

/// Polynomial symbol `Σ c_ij q^i p^j` with total degree at most [`MAX_DEGREE`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolySymbol<R: Scalar> {
    terms: BTreeMap<(u32, u32), Complex<R>>,
}

impl<R: Scalar> Default for PolySymbol<R> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<R: Scalar> PolySymbol<R> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex<R>) -> Self {
        let mut p = Self::zero();
        p.insert(0, 0, c);
        p
    }

    pub fn monomial(i: u32, j: u32, c: Complex<R>) -> Result<Self> {
        if i + j > MAX_DEGREE {
            return Err(Error::DegreeOverflow { degree: i + j, max: MAX_DEGREE });
        }
        let mut p = Self::zero();
        p.insert(i, j, c);
        Ok(p)
    }

    pub fn q() -> Self {
        Self::monomial(1, 0, Complex::new(R::one(), R::zero())).expect("degree 1")
    }

    pub fn p() -> Self {
        Self::monomial(0, 1, Complex::new(R::one(), R::zero())).expect("degree 1")
    }

    fn insert(&mut self, i: u32, j: u32, c: Complex<R>) {
        let entry = self.terms.entry((i, j)).or_insert_with(Complex::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Complex<R>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, i: u32, j: u32) -> Complex<R> {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.insert(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex::new(R::zero() - R::one(), R::zero())))
    }

    pub fn scale(&self, c: Complex<R>) -> Self {
        let mut out = Self::zero();
        for (&(i, j), v) in &self.terms {
            out.insert(i, j, v.clone() * c.clone());
        }
        out
    }

    /// Pointwise (commutative) product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let degree = self.degree() + other.degree();
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow { degree, max: MAX_DEGREE });
        }
        let mut out = Self::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &other.terms {
                out.insert(i + k, j + l, a.clone() * b.clone());
            }
        }
        Ok(out)
    }

    /// `∂_q^a ∂_p^b`.
    pub fn derivative(&self, a: u32, b: u32) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            if i >= a && j >= b {
                let factor: R = falling::<R>(i, a) * falling::<R>(j, b);
                out.insert(i - a, j - b, c.clone() * Complex::new(factor, R::zero()));
            }
        }
        out
    }
}

impl PolySymbol<f64> {
    pub fn eval(&self, q: f64, p: f64) -> Complex64 {
        self.terms.iter().map(|(&(i, j), c)| c * q.powi(i as i32) * p.powi(j as i32)).sum()
    }

    pub fn sample(&self, grid: &PhaseSpaceGrid) -> ComplexField2D {
        ComplexField2D::from_fn(*grid, |q, p| self.eval(q, p))
    }
}

/// `a ⋆_s b = a exp{(iħ/2)[(1-s)∂⃖_q∂⃗_p - (1+s)∂⃖_p∂⃗_q]} b`, exactly.
pub fn star_poly<R: Scalar>(a: &PolySymbol<R>, b: &PolySymbol<R>, s: R, hbar: R) -> Result<PolySymbol<R>> {
    let degree = if a.is_zero() || b.is_zero() { 0 } else { a.degree() + b.degree() };
    if degree > MAX_DEGREE {
        return Err(Error::DegreeOverflow { degree, max: MAX_DEGREE });
    }
    let two = R::one() + R::one();
    let half_i_hbar = Complex::new(R::zero(), hbar / two);
    let plus = R::one() - s.clone();
    let minus = R::zero() - (R::one() + s);
    let mut out = PolySymbol::zero();
    let mut prefactor = Complex::new(R::one(), R::zero());
    for k in 0..=a.degree().min(b.degree()) {
        if k > 0 {
            prefactor = prefactor * half_i_hbar.clone() / Complex::new(from_count::<R>(k as u64), R::zero());
        }
        for j in 0..=k {
            let weight = falling::<R>(k, j) / falling::<R>(j, j) * pow(plus.clone(), j) * pow(minus.clone(), k - j);
            let da = a.derivative(j, k - j);
            let db = b.derivative(k - j, j);
            if da.is_zero() || db.is_zero() || weight.is_zero() {
                continue;
            }
            out = out.add(&da.mul(&db)?.scale(prefactor.clone() * Complex::new(weight, R::zero())));
        }
    }
    Ok(out)
}

fn pow<R: Scalar>(x: R, k: u32) -> R {
    (0..k).fold(R::one(), |acc, _| acc * x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn cr(re: Rational64, im: Rational64) -> Complex<Rational64> {
        Complex::new(re, im)
    }

    #[test]
    fn canonical_pair() {
        let q = PolySymbol::<Rational64>::q();
        let p = PolySymbol::<Rational64>::p();
        let qp = star_poly(&q, &p, r(0, 1), r(1, 1)).unwrap();
        let pq = star_poly(&p, &q, r(0, 1), r(1, 1)).unwrap();
        assert_eq!(qp.coefficient(1, 1), cr(r(1, 1), r(0, 1)));
        assert_eq!(qp.coefficient(0, 0), cr(r(0, 1), r(1, 2)));
        assert_eq!(pq.coefficient(0, 0), cr(r(0, 1), r(-1, 2)));
        assert_eq!(qp.sub(&pq), PolySymbol::constant(cr(r(0, 1), r(1, 1))));
        assert_ne!(qp, pq);
    }

    #[test]
    fn s_ordered_pair() {
        let q = PolySymbol::<Rational64>::q();
        let p = PolySymbol::<Rational64>::p();
        for s in [r(-1, 1), r(-1, 2), r(1, 3), r(1, 1)] {
            let hbar = r(3, 2);
            let qp = star_poly(&q, &p, s, hbar).unwrap();
            assert_eq!(qp.coefficient(0, 0), cr(r(0, 1), hbar * (r(1, 1) - s) / r(2, 1)));
        }
    }

    #[test]
    fn unit_is_neutral() {
        let one = PolySymbol::constant(cr(r(1, 1), r(0, 1)));
        let b = PolySymbol::monomial(2, 3, cr(r(2, 1), r(-1, 1))).unwrap().add(&PolySymbol::p());
        assert_eq!(star_poly(&one, &b, r(1, 2), r(1, 1)).unwrap(), b);
        assert_eq!(star_poly(&b, &one, r(-1, 2), r(1, 1)).unwrap(), b);
    }

    #[test]
    fn degree_bound() {
        assert!(PolySymbol::<f64>::monomial(5, 4, Complex64::new(1.0, 0.0)).is_err());
        let a = PolySymbol::<f64>::monomial(4, 1, Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(star_poly(&a, &a, 0.0, 1.0), Err(Error::DegreeOverflow { degree: 10, max: 8 })));
    }

    #[test]
    fn lagrange_potential_is_exact_on_polynomials() {
        let grid = Grid1D::symmetric(64, 8.0).unwrap();
        let values = grid.coords().iter().map(|q| q * q * q - 2.0 * q).collect();
        let v = Potential::Sampled { grid, values };
        for x in [-3.3, 0.07, 5.51] {
            assert!((v.eval(x).unwrap() - (x * x * x - 2.0 * x)).abs() < 1e-9);
        }
        assert!(v.eval(9.0).is_none());
    }
}
