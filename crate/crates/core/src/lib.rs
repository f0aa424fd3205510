//! Phase-space representations of one-dimensional quantum mechanics.
//!
//! The crate covers the Agarwal–Wolf family of s-ordered quasi-distributions
//! `W_s` and the phase-space wavefunctions `ψ_s` that solve the one-sided
//! equation `H ⋆_s ψ_s = E ψ_s`:
//!
//! - [`grid`]: uniform grids, the partial Fourier transform `y ↔ p`, quadrature.
//! - [`states`]: Hermite and coherent states, momentum transforms, density matrices.
//! - [`kernels`]: integral kernels `K(Γ; q')` (coherent-state, Bargmann, `g`-kernels,
//!   the s-family) and their unitarity checks.
//! - [`solutions`]: constructive general solutions of the phase-space Schrödinger
//!   equations for an arbitrary function `g`.
//! - [`quasidist`]: `W_s`, Husimi and Kirkwood–Rihaczek distributions, marginals,
//!   purity, and the operator ↔ symbol transforms.
//! - [`star`]: exact s-star products with `H = p²/2m + V(q)`, a polynomial star
//!   engine, and left/right eigen-equation residuals.
//! - [`io`] and [`cli`]: CSV/JSON export and the `phasespace` command-line driver.
//!
//! Every quantity is dimensionless with `ħ` carried explicitly (default 1).
//! Runnable walkthroughs live in the crate's `examples/` directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod grid;
pub mod io;
pub mod kernels;
mod linalg;
pub mod quasidist;
pub mod solutions;
pub mod star;
pub mod states;

pub use error::{Error, Result};
pub use grid::{
    integrate_phase, make_phase_grid, partial_fourier_p_to_y, partial_fourier_y_to_p, ComplexField2D, Grid1D, Measure,
    PhaseSpaceGrid, SecondAxis,
};
pub use kernels::{
    build_kernel, check_kernel_unitarity, g_norm_residual, gauge_transform, kernel_transform, Convention, GFunction,
    KernelSpec, KernelVariant, PhaseSpaceWavefunction, UnitarityMeasure,
};
pub use quasidist::{
    expectation, husimi, marginals, operator_to_symbol, psi_s_pure, purity_integral, symbol_to_operator,
    wigner_from_pure, wigner_s_from_density, OperatorMatrix, QuasiDistribution,
};
pub use solutions::{solve_section2, solve_section3, wigner_conjugate_g};
pub use star::{eigen_residuals, star_apply_left, star_apply_right, star_poly, HamiltonianSpec, PolySymbol};
pub use states::{
    coherent_wavefunction, density_from_mixture, hermite_eigenstate, laguerre, momentum_representation, DensityMatrix,
    OscillatorUnits, PositionWavefunction,
};
