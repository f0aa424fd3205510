mod common;

use num_complex::Complex64;
use phasespace::star::Potential;
use phasespace::*;

use common::*;

fn binomial(k: u32, j: u32) -> f64 {
    factorial(k) / (factorial(j) * factorial(k - j))
}

/// Derivative of `P(q,p) e^{-(q²+p²)/2}`, returned as the polynomial prefactor.
fn gauss_derivative(poly: &PolySymbol<f64>, a: u32, b: u32) -> PolySymbol<f64> {
    let mut out = poly.clone();
    for _ in 0..a {
        out = out.derivative(1, 0).sub(&PolySymbol::q().mul(&out).unwrap());
    }
    for _ in 0..b {
        out = out.derivative(0, 1).sub(&PolySymbol::p().mul(&out).unwrap());
    }
    out
}

/// Truncation-free `H ⋆_s f` (or `f ⋆_s H`) for polynomial `H` and `f = P e^{-(q²+p²)/2}`.
fn series_star(h: &PolySymbol<f64>, prefactor: &PolySymbol<f64>, s: f64, left: bool, q: f64, p: f64) -> Complex64 {
    let g = (-(q * q + p * p) / 2.0).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=h.degree() {
        let base = Complex64::new(0.0, 0.5).powi(k as i32) / factorial(k);
        for j in 0..=k {
            let c = base * binomial(k, j) * (1.0 - s).powi(j as i32) * (-(1.0 + s)).powi((k - j) as i32);
            let term = if left {
                h.derivative(j, k - j).eval(q, p) * gauss_derivative(prefactor, k - j, j).eval(q, p)
            } else {
                gauss_derivative(prefactor, j, k - j).eval(q, p) * h.derivative(k - j, j).eval(q, p)
            };
            acc += c * term * g;
        }
    }
    acc
}

fn prefactor() -> PolySymbol<f64> {
    PolySymbol::q()
        .add(&PolySymbol::monomial(0, 2, Complex64::new(2.0, 0.0)).unwrap())
        .add(&PolySymbol::monomial(1, 1, Complex64::new(0.0, -0.5)).unwrap())
}

#[test]
fn grid_star_matches_series_for_quartic_potential() {
    let grid = desk_grid();
    let h = HamiltonianSpec::new(1.0, Potential::Polynomial(vec![0.0, 0.3, 0.5, 0.0, 0.1])).unwrap();
    let hpoly = h.to_poly().unwrap().unwrap();
    let pre = prefactor();
    let f = ComplexField2D::from_fn(grid, |q, p| pre.eval(q, p) * (-(q * q + p * p) / 2.0).exp());
    for s in [-0.5, 0.0, 0.5, 1.0] {
        let left = star_apply_left(&h, &f, s).unwrap();
        let right = star_apply_right(&h, &f, s).unwrap();
        let mut worst = 0.0f64;
        for i in (96..160).step_by(3) {
            for j in (96..160).step_by(3) {
                let (q, p) = (grid.qgrid.coord(i), grid.pgrid.coord(j));
                worst = worst.max((left.values[[i, j]] - series_star(&hpoly, &pre, s, true, q, p)).norm());
                worst = worst.max((right.values[[i, j]] - series_star(&hpoly, &pre, s, false, q, p)).norm());
            }
        }
        assert!(worst < 1e-9, "s={s}: {worst:e}");
    }
}

#[test]
fn conjugation_swaps_sides_and_orderings() {
    let grid = desk_grid();
    let h = HamiltonianSpec::new(1.0, Potential::Polynomial(vec![0.0, 0.0, 0.5, 0.0, 0.05])).unwrap();
    let pre = prefactor();
    let f = ComplexField2D::from_fn(grid, |q, p| pre.eval(q, p) * (-(q * q + p * p) / 2.0).exp());
    let fbar = ComplexField2D::new(grid, SecondAxis::Momentum, f.values.mapv(|z| z.conj())).unwrap();
    for s in [-0.5, 0.0, 0.7] {
        let lhs = star_apply_left(&h, &f, s).unwrap().values.mapv(|z| z.conj());
        let rhs = star_apply_right(&h, &fbar, -s).unwrap();
        let lhs = ComplexField2D::new(grid, SecondAxis::Momentum, lhs).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10, "s={s}");
    }
}

#[test]
fn star_with_unity_returns_the_symbol() {
    let grid = make_phase_grid(128, 8.0, 1.0).unwrap();
    let h = HamiltonianSpec::harmonic(&unit());
    let one = ComplexField2D::from_real_fn(grid, |_, _| 1.0);
    let sym = h.symbol(&grid).unwrap();
    for s in [-1.0, 0.0, 1.0] {
        for out in [star_apply_left(&h, &one, s).unwrap(), star_apply_right(&h, &one, s).unwrap()] {
            let mut worst = 0.0f64;
            for ((i, j), v) in out.values.indexed_iter() {
                worst = worst.max((v - sym.values[[i, j]]).norm());
            }
            assert!(worst < 1e-9, "s={s}: {worst:e}");
        }
    }
}

#[test]
fn wigner_functions_solve_both_equations() {
    let grid = desk_grid();
    let h = HamiltonianSpec::harmonic(&unit());
    for n in [0usize, 4] {
        let rho = DensityMatrix::pure(&hermite_eigenstate(n, &unit(), &grid.qgrid).unwrap()).unwrap();
        for s in [-0.5, 0.0, 0.5, 1.0] {
            let w = wigner_s_from_density(&rho, s, &grid).unwrap();
            let r = eigen_residuals(&h, &w.field, unit().energy(n), s).unwrap();
            assert!(r.left < 1e-8 && r.right < 1e-8, "n={n} s={s}: {} {}", r.left, r.right);
            assert_eq!(r.mask, 0.1);
        }
    }
}

#[test]
fn non_eigenstates_have_large_residuals() {
    let grid = desk_grid();
    let h = HamiltonianSpec::harmonic(&unit());
    let squeezed = ComplexField2D::from_real_fn(grid, |q, p| (-(2.0 * q * q + p * p / 2.0)).exp());
    let r = eigen_residuals(&h, &squeezed, 0.5, 0.0).unwrap();
    assert!(r.left > 0.1 && r.right > 0.1);
    assert!(matches!(eigen_residuals(&h, &ComplexField2D::zeros(grid), 0.5, 0.0), Err(Error::ZeroFunction)));
}

#[test]
fn sampled_potential_agrees_with_polynomial() {
    let grid = make_phase_grid(128, 8.0, 1.0).unwrap();
    let wide = Grid1D::symmetric(1024, 24.0).unwrap();
    let poly = Potential::Polynomial(vec![0.0, 0.0, 0.5, 0.0, 0.02]);
    let values = wide.coords().iter().map(|&x| poly.eval(x).unwrap()).collect();
    let sampled = HamiltonianSpec::new(1.0, Potential::Sampled { grid: wide, values }).unwrap();
    let exact = HamiltonianSpec::new(1.0, poly).unwrap();
    let f = ComplexField2D::from_real_fn(grid, |q, p| (-(q * q + p * p) / 2.0).exp());
    for s in [-0.5, 0.5] {
        let a = star_apply_left(&sampled, &f, s).unwrap();
        let b = star_apply_left(&exact, &f, s).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-8, "s={s}: {:e}", a.max_abs_diff(&b));
    }
}

#[test]
fn sampled_potential_is_never_extrapolated() {
    let grid = make_phase_grid(128, 8.0, 1.0).unwrap();
    let narrow = Grid1D::symmetric(64, 4.0).unwrap();
    let h = HamiltonianSpec::new(1.0, Potential::Sampled { grid: narrow, values: vec![0.0; 64] }).unwrap();
    let f = ComplexField2D::from_real_fn(grid, |q, p| (-(q * q + p * p) / 2.0).exp());
    assert!(matches!(star_apply_left(&h, &f, 0.0), Err(Error::Support(_))));
    assert!(HamiltonianSpec::new(1.0, Potential::Sampled { grid: narrow, values: vec![0.0; 3] }).is_err());
    assert!(HamiltonianSpec::new(-1.0, Potential::Polynomial(vec![])).is_err());
}

#[test]
fn polynomial_engine_canonical_relations() {
    let hbar = 1.0;
    let (q, p) = (PolySymbol::<f64>::q(), PolySymbol::<f64>::p());
    for s in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let qp = star_poly(&q, &p, s, hbar).unwrap();
        let pq = star_poly(&p, &q, s, hbar).unwrap();
        assert_eq!(qp.coefficient(1, 1), Complex64::new(1.0, 0.0));
        assert!((qp.coefficient(0, 0) - Complex64::new(0.0, 0.5 * (1.0 - s))).norm() < 1e-15);
        assert!((pq.coefficient(0, 0) - Complex64::new(0.0, -0.5 * (1.0 + s))).norm() < 1e-15);
        let h = HamiltonianSpec::harmonic(&unit()).to_poly().unwrap().unwrap();
        let comm = star_poly(&h, &q, s, hbar).unwrap().sub(&star_poly(&q, &h, s, hbar).unwrap());
        // [H, q] = -iħ p
        assert!(comm.sub(&p.scale(Complex64::new(0.0, -1.0))).terms().all(|(_, c)| c.norm() < 1e-15));
    }
}
