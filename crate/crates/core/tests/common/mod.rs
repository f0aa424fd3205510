//! Closed-form references shared by the integration tests. They use explicit
//! polynomial sums rather than the library's recurrences.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use phasespace::{make_phase_grid, OscillatorUnits, PhaseSpaceGrid};

pub fn desk_grid() -> PhaseSpaceGrid {
    make_phase_grid(256, 16.0, 1.0).unwrap()
}

pub fn unit() -> OscillatorUnits {
    OscillatorUnits::default()
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Physicists' Hermite polynomial from its explicit sum.
pub fn hermite_poly(n: u32, x: f64) -> f64 {
    (0..=n / 2)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * factorial(n) / (factorial(m) * factorial(n - 2 * m)) * (2.0 * x).powi((n - 2 * m) as i32)
        })
        .sum()
}

/// Oscillator eigenfunction at `λ = 1`.
pub fn phi_n(n: u32, x: f64) -> f64 {
    hermite_poly(n, x) * (-x * x / 2.0).exp() / (2f64.powi(n as i32) * factorial(n) * PI.sqrt()).sqrt()
}

/// `φ̃_n(p) = (-i)^n φ_n(p)` at `λ = ħ = 1`.
pub fn phi_n_momentum(n: u32, p: f64) -> Complex64 {
    Complex64::new(0.0, -1.0).powi(n as i32) * phi_n(n, p)
}

pub fn laguerre_poly(n: u32, x: f64) -> f64 {
    (0..=n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(n, k) * x.powi(k as i32) / factorial(k)
        })
        .sum()
}

/// `W_n = (-1)^n/πħ L_n(4H) e^{-2H}` with `H = (q² + p²)/2`.
pub fn wigner_n(n: u32, q: f64, p: f64) -> f64 {
    let h = 0.5 * (q * q + p * p);
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign / PI * laguerre_poly(n, 4.0 * h) * (-2.0 * h).exp()
}

/// `|ψ_n(Γ)|² = H^n e^{-H} / n!`.
pub fn husimi_n(n: u32, q: f64, p: f64) -> f64 {
    let h = 0.5 * (q * q + p * p);
    h.powi(n as i32) * (-h).exp() / factorial(n)
}

/// `(2π)^{-1/2} e^{-ipq} φ_n(q) φ̃_n*(p)`.
pub fn kirkwood_n(n: u32, q: f64, p: f64) -> Complex64 {
    Complex64::cis(-p * q) * phi_n(n, q) * phi_n_momentum(n, p).conj() / (2.0 * PI).sqrt()
}

/// Max over the grid of `|field - f(q,p)|`.
pub fn max_err(grid: &PhaseSpaceGrid, values: &ndarray::Array2<Complex64>, f: impl Fn(f64, f64) -> Complex64) -> f64 {
    let qs = grid.qgrid.coords();
    let ps = grid.pgrid.coords();
    values.indexed_iter().fold(0.0f64, |m, ((i, j), z)| m.max((z - f(qs[i], ps[j])).norm()))
}
