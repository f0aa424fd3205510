mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use phasespace::solutions::random_gaussian_mixture_g;
use phasespace::*;

use common::*;

fn gaussian_g(ygrid: Grid1D) -> GFunction {
    GFunction::from_fn(ygrid, 0.0, |y| Complex64::new(0.6, 0.3) * (-(y - 0.4).powi(2) / 1.8).exp()).unwrap()
}

/// Trapezoid evaluation of `e^{-iqp/2} ∫ e^{-ipy} g(y) φ_n(q+y) dy` with analytic φ.
fn unscaled_quadrature(n: u32, g: impl Fn(f64) -> Complex64, q: f64, p: f64) -> Complex64 {
    let h = 1e-3;
    let sum: Complex64 = (-12_000..=12_000)
        .map(|k| {
            let y = k as f64 * h;
            Complex64::cis(-p * y) * g(y) * phi_n(n, q + y)
        })
        .sum();
    Complex64::cis(-q * p / 2.0) * sum * h
}

#[test]
fn unscaled_solution_matches_independent_quadrature() {
    let grid = desk_grid();
    let g = gaussian_g(grid.y_lattice(2).unwrap());
    let g_exact = |y: f64| Complex64::new(0.6, 0.3) * (-(y - 0.4).powi(2) / 1.8).exp();
    for n in [0u32, 2] {
        let phi = hermite_eigenstate(n as usize, &unit(), &grid.qgrid).unwrap();
        let psi = solve_section2(&phi, &g, &grid).unwrap();
        for (i, j) in [(128, 128), (120, 131), (140, 118), (133, 140)] {
            let (q, p) = (grid.qgrid.coord(i), grid.pgrid.coord(j));
            let err = (psi.field.values[[i, j]] - unscaled_quadrature(n, g_exact, q, p)).norm();
            assert!(err < 1e-9, "n={n} ({q},{p}): {err:e}");
        }
    }
}

#[test]
fn wigner_conjugate_g_yields_the_wigner_function() {
    let grid = desk_grid();
    let phi = hermite_eigenstate(0, &unit(), &grid.qgrid).unwrap();
    let g = wigner_conjugate_g(&phi, 0.0, grid.y_lattice(2).unwrap()).unwrap();
    let psi = solve_section3(&phi, &g, 0.0, &grid).unwrap();
    let err = max_err(&grid, &psi.field.values, |q, p| (2.0 * (-(q * q + p * p)).exp()).into());
    assert!(err < 1e-10, "{err:e}");
}

#[test]
fn the_same_g_in_the_unscaled_equation_is_not_the_wigner_function() {
    // the unscaled solution with g = φ_0*(-y/2) is a Gaussian of value √(8/5) at the origin
    let grid = desk_grid();
    let phi = hermite_eigenstate(0, &unit(), &grid.qgrid).unwrap();
    let g = wigner_conjugate_g(&phi, 0.0, grid.y_lattice(2).unwrap()).unwrap();
    let psi = solve_section2(&phi, &g, &grid).unwrap();
    assert!((psi.field.values[[128, 128]].re - (8.0f64 / 5.0).sqrt()).abs() < 1e-10);
}

#[test]
fn one_sided_solutions_for_every_ordering() {
    let grid = desk_grid();
    let ygrid = grid.y_lattice(2).unwrap();
    let h = HamiltonianSpec::harmonic(&unit());
    for s in [-0.5, 0.0, 0.5, 1.0] {
        let mut g = gaussian_g(ygrid);
        g.target_s = s;
        for n in 0..=2 {
            let phi = hermite_eigenstate(n, &unit(), &grid.qgrid).unwrap();
            let psi = solve_section3(&phi, &g, s, &grid).unwrap();
            let r = eigen_residuals(&h, &psi.field, unit().energy(n), s).unwrap();
            assert!(r.left < 1e-5, "s={s} n={n}: {:e}", r.left);
            assert!(r.right > 0.05, "s={s} n={n}: {:e}", r.right);
        }
    }
}

#[test]
fn s_one_reduces_to_kirkwood_rihaczek() {
    let grid = desk_grid();
    let phi = hermite_eigenstate(1, &unit(), &grid.qgrid).unwrap();
    let g = wigner_conjugate_g(&phi, 1.0, grid.y_lattice(2).unwrap()).unwrap();
    let psi = solve_section3(&phi, &g, 1.0, &grid).unwrap();
    let err = max_err(&grid, &psi.field.values, |q, p| kirkwood_n(1, q, p) * 2.0 * PI);
    assert!(err < 1e-10, "{err:e}");
}

#[test]
fn normalized_g_gives_unit_norm() {
    let grid = desk_grid();
    let ygrid = grid.y_lattice(2).unwrap();
    for (s, seed) in [(-0.5, 4), (0.0, 5), (0.5, 6)] {
        let g = random_gaussian_mixture_g(ygrid, s, 3, seed).unwrap();
        assert!(g_norm_residual(&g, Convention::SectionIII).unwrap() < 1e-12);
        let phi = hermite_eigenstate(1, &unit(), &grid.qgrid).unwrap();
        let psi = solve_section3(&phi, &g, s, &grid).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-8, "s={s}: {}", psi.norm_sqr());
    }
}

#[test]
fn seeded_mixtures_are_reproducible() {
    let ygrid = desk_grid().y_lattice(2).unwrap();
    let a = random_gaussian_mixture_g(ygrid, 0.5, 3, 42).unwrap();
    let b = random_gaussian_mixture_g(ygrid, 0.5, 3, 42).unwrap();
    let c = random_gaussian_mixture_g(ygrid, 0.5, 3, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn singular_ordering_is_rejected() {
    let grid = desk_grid();
    let ygrid = grid.y_lattice(2).unwrap();
    let phi = hermite_eigenstate(0, &unit(), &grid.qgrid).unwrap();
    assert!(matches!(wigner_conjugate_g(&phi, -1.0, ygrid), Err(Error::SingularOrdering)));
    assert!(matches!(random_gaussian_mixture_g(ygrid, -1.0, 2, 1), Err(Error::SingularOrdering)));
    assert!(matches!(solve_section3(&phi, &gaussian_g(ygrid), -1.0, &grid), Err(Error::SingularOrdering)));
}

#[test]
fn mismatched_g_step_is_rejected() {
    let grid = desk_grid();
    let phi = hermite_eigenstate(0, &unit(), &grid.qgrid).unwrap();
    let coarse = gaussian_g(Grid1D::symmetric(64, 16.0).unwrap());
    assert!(matches!(solve_section3(&phi, &coarse, 0.0, &grid), Err(Error::GridMismatch(_))));
}
