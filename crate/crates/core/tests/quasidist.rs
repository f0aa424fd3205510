mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use phasespace::quasidist::{kirkwood_rihaczek, DistributionSource, OperatorKind};
use phasespace::*;

use common::*;

/// Cat state `N (φ_a + φ_b)` of two coherent states with analytic samples.
fn cat(q: f64) -> Complex64 {
    let lobe = |q0: f64, p0: f64| Complex64::cis(p0 * (q - q0)) * (-(q - q0).powi(2) / 2.0).exp() * PI.powf(-0.25);
    lobe(-2.0, 0.5) + lobe(2.5, -1.0)
}

#[test]
fn wigner_matches_direct_quadrature_for_a_cat_state() {
    let grid = desk_grid();
    let samples: Vec<Complex64> = grid.qgrid.coords().iter().map(|&q| cat(q)).collect();
    let phi = PositionWavefunction::normalized(grid.qgrid, samples).unwrap();
    let raw_norm: f64 = {
        let h = 1e-3;
        (-20_000..=20_000).map(|k| cat(k as f64 * h).norm_sqr()).sum::<f64>() * h
    };
    let w = wigner_from_pure(&phi, &grid).unwrap();
    for (i, j) in [(128, 128), (116, 130), (140, 122), (125, 137)] {
        let (q, p) = (grid.qgrid.coord(i), grid.pgrid.coord(j));
        let h = 1e-3;
        let direct: Complex64 = (-20_000..=20_000)
            .map(|k| {
                let y = k as f64 * h;
                cat(q - y / 2.0).conj() * cat(q + y / 2.0) * Complex64::cis(-p * y)
            })
            .sum::<Complex64>()
            * h
            / (2.0 * PI * raw_norm);
        assert!((w.field.values[[i, j]] - direct).norm() < 1e-9, "({q},{p})");
    }
}

#[test]
fn pure_state_routes_agree() {
    let grid = desk_grid();
    let phi = hermite_eigenstate(2, &unit(), &grid.qgrid).unwrap();
    let rho = DensityMatrix::pure(&phi).unwrap();
    let w0 = wigner_from_pure(&phi, &grid).unwrap();
    let via_rho = wigner_s_from_density(&rho, 0.0, &grid).unwrap();
    assert!(w0.field.max_abs_diff(&via_rho.field) < 1e-10);
    for s in [-0.5, 0.5] {
        let psi = psi_s_pure(&phi, s, &grid).unwrap();
        let ws = wigner_s_from_density(&rho, s, &grid).unwrap();
        assert!(psi.field.scaled((1.0 / (2.0 * PI)).into()).max_abs_diff(&ws.field) < 1e-10);
    }
    let kr = kirkwood_rihaczek(&phi, &grid).unwrap();
    let w1 = wigner_s_from_density(&rho, 1.0, &grid).unwrap();
    assert!(kr.field.max_abs_diff(&w1.field) < 1e-10);
}

#[test]
fn only_the_symmetric_ordering_is_real() {
    let grid = desk_grid();
    let rho = DensityMatrix::pure(&hermite_eigenstate(1, &unit(), &grid.qgrid).unwrap()).unwrap();
    assert!(wigner_s_from_density(&rho, 0.0, &grid).unwrap().field.max_imag() < 1e-12);
    for s in [0.5, 1.0] {
        let plus = wigner_s_from_density(&rho, s, &grid).unwrap();
        let minus = wigner_s_from_density(&rho, -s, &grid).unwrap();
        assert!(plus.field.max_imag() > 1e-2);
        let conj = plus.field.values.mapv(|z| z.conj());
        let diff = (&conj - &minus.field.values).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(diff < 1e-10, "s={s}: {diff:e}");
    }
}

#[test]
fn expectation_values() {
    let grid = desk_grid();
    let u = unit();
    let gamma = u.gamma(1.5, -0.5);
    let phi = coherent_wavefunction(gamma, &u, &grid.qgrid).unwrap();
    let rho = DensityMatrix::pure(&phi).unwrap();
    let id = OperatorMatrix::identity(grid.qgrid);
    let q = OperatorMatrix::position(grid.qgrid);
    let h = OperatorMatrix::harmonic(grid.qgrid, &u);
    for s in [-0.5, 0.0, 0.5] {
        let w = wigner_s_from_density(&rho, s, &grid).unwrap();
        assert!((expectation(&w, &id).unwrap() - 1.0).norm() < 1e-8, "s={s}");
        assert!((expectation(&w, &q).unwrap() - 1.5).norm() < 1e-8, "s={s}");
        // ⟨H⟩ = |Γ|² + 1/2
        let e = gamma.norm_sqr() + 0.5;
        assert!((expectation(&w, &h).unwrap() - e).norm() < 1e-6, "s={s}");
    }
}

#[test]
fn hamiltonian_symbol_is_ordering_independent() {
    let grid = desk_grid();
    let h = OperatorMatrix::harmonic(grid.qgrid, &unit());
    for s in [-0.5, 0.0, 1.0] {
        let sym = operator_to_symbol(&h, s, &grid).unwrap();
        let mut worst = 0.0f64;
        for ((i, j), v) in sym.values.indexed_iter() {
            let (q, p) = (grid.qgrid.coord(i), grid.pgrid.coord(j));
            if q.abs() < 6.0 && p.abs() < 6.0 {
                worst = worst.max((v - 0.5 * (q * q + p * p)).norm());
            }
        }
        assert!(worst < 1e-6, "s={s}: {worst:e}");
    }
}

#[test]
fn density_operator_roundtrips_through_every_ordering() {
    let grid = desk_grid();
    let rho = DensityMatrix::pure(&hermite_eigenstate(1, &unit(), &grid.qgrid).unwrap()).unwrap();
    let op = OperatorMatrix::from_density(&rho);
    assert_eq!(op.kind, OperatorKind::Density);
    for s in [-0.5, 0.0, 0.5, 1.0] {
        let w = op.to_quasi(s, &grid).unwrap();
        let direct = wigner_s_from_density(&rho, s, &grid).unwrap();
        assert!(w.field.max_abs_diff(&direct.field) < 1e-10, "s={s}");
    }
    assert!(OperatorMatrix::identity(grid.qgrid).to_quasi(0.0, &grid).is_err());
}

#[test]
fn marginals_of_a_coherent_state() {
    let grid = desk_grid();
    let u = unit();
    let phi = coherent_wavefunction(u.gamma(-1.0, 2.0), &u, &grid.qgrid).unwrap();
    let m = marginals(&wigner_from_pure(&phi, &grid).unwrap());
    assert!(m.exact);
    for (q, v) in grid.qgrid.coords().iter().zip(&m.pq) {
        assert!((v - (-(q + 1.0).powi(2)).exp() / PI.sqrt()).abs() < 1e-10);
    }
    for (p, v) in grid.pgrid.coords().iter().zip(&m.pp) {
        assert!((v - (-(p - 2.0).powi(2)).exp() / PI.sqrt()).abs() < 1e-10);
    }
}

#[test]
fn husimi_marginals_are_broadened() {
    let grid = desk_grid();
    let h = husimi(&hermite_eigenstate(0, &unit(), &grid.qgrid).unwrap(), &unit(), &grid).unwrap();
    assert_eq!(h.source, DistributionSource::Husimi);
    assert!(h.s.is_none());
    assert!((h.normalization() - 1.0).norm() < 1e-10);
    let m = marginals(&h);
    assert!(!m.exact);
    // Q_0 marginal is N(0, 1): variance 1/2 + 1/2
    let var: f64 = grid.qgrid.coords().iter().zip(&m.pq).map(|(q, v)| q * q * v).sum::<f64>() * grid.qgrid.step();
    assert!((var - 1.0).abs() < 1e-10, "{var}");
}

#[test]
fn husimi_peak_for_the_third_state() {
    let grid = desk_grid();
    let h = husimi(&hermite_eigenstate(3, &unit(), &grid.qgrid).unwrap(), &unit(), &grid).unwrap();
    let peak = h.transition_probability().unwrap().iter().fold(0.0f64, |m, v| m.max(*v));
    let exact = 27.0 * (-3.0f64).exp() / 6.0;
    // the maximum ring H = 3 passes between grid nodes
    assert!(peak <= exact + 1e-12 && peak > exact * 0.999, "{peak}");
}

#[test]
fn mixed_state_purity_and_negativity() {
    let grid = desk_grid();
    let states: Vec<_> = (0..3).map(|n| hermite_eigenstate(n, &unit(), &grid.qgrid).unwrap()).collect();
    let rho =
        density_from_mixture(&[(0.5, states[0].clone()), (0.3, states[1].clone()), (0.2, states[2].clone())]).unwrap();
    assert!((rho.purity() - 0.38).abs() < 1e-10);
    let w = wigner_s_from_density(&rho, 0.0, &grid).unwrap();
    assert!((purity_integral(&w).unwrap() - 0.38).abs() < 1e-8);
    // W(0,0) = Σ w_n (-1)^n / π
    let origin = (0.5 - 0.3 + 0.2) / PI;
    assert!((w.field.values[[128, 128]].re - origin).abs() < 1e-10);
}

#[test]
fn wavefunctions_reaching_the_boundary_are_rejected() {
    let grid = make_phase_grid(64, 4.0, 1.0).unwrap();
    let wide: Vec<Complex64> = grid.qgrid.coords().iter().map(|q| Complex64::from((-q * q / 18.0).exp())).collect();
    let phi = PositionWavefunction::normalized(grid.qgrid, wide).unwrap();
    assert!(matches!(psi_s_pure(&phi, 0.5, &grid), Err(Error::Support(_))));
}

#[test]
fn harmonic_eigenstates_are_hermite_functions() {
    let grid = desk_grid();
    let states = OperatorMatrix::harmonic(grid.qgrid, &unit()).eigenstates(4).unwrap();
    for (n, (e, phi)) in states.iter().enumerate() {
        assert!((e - (n as f64 + 0.5)).abs() < 1e-8);
        let reference = hermite_eigenstate(n, &unit(), &grid.qgrid).unwrap();
        assert!((phi.inner(&reference).unwrap().norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn half_shift_form_with_doubled_frequency_is_the_same_function() {
    // W = (1/πħ) ∫ ⟨q-y|ρ|q+y⟩ e^{2ipy/ħ} dy by direct quadrature
    let grid = desk_grid();
    let samples: Vec<Complex64> = grid.qgrid.coords().iter().map(|&q| cat(q)).collect();
    let phi = PositionWavefunction::normalized(grid.qgrid, samples).unwrap();
    let w = wigner_from_pure(&phi, &grid).unwrap();
    let h = 5e-4;
    let raw_norm: f64 = (-40_000..=40_000).map(|k| cat(k as f64 * h).norm_sqr()).sum::<f64>() * h;
    for (i, j) in [(128, 128), (112, 133), (146, 120)] {
        let (q, p) = (grid.qgrid.coord(i), grid.pgrid.coord(j));
        let x12: Complex64 = (-20_000..=20_000)
            .map(|k| {
                let y = k as f64 * h;
                cat(q - y) * cat(q + y).conj() * Complex64::cis(2.0 * p * y)
            })
            .sum::<Complex64>()
            * h
            / (PI * raw_norm);
        assert!((w.field.values[[i, j]] - x12).norm() < 1e-9, "({q},{p})");
    }
}

#[test]
fn density_symbol_is_two_pi_hbar_times_wigner() {
    let grid = desk_grid();
    let rho = DensityMatrix::pure(&hermite_eigenstate(0, &unit(), &grid.qgrid).unwrap()).unwrap();
    let sym = operator_to_symbol(&OperatorMatrix::from_density(&rho), 0.0, &grid).unwrap();
    let err = max_err(&grid, &sym.values, |q, p| (2.0 * PI * wigner_n(0, q, p)).into());
    assert!(err < 1e-8, "{err:e}");
}
