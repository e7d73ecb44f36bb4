//! Band structures of one-dimensional periodic potentials.
//!
//! This crate solves the time-independent Schrödinger equation for the
//! Kronig-Penney (periodic rectangular barrier) and Dirac comb (periodic
//! delta) potentials in Hartree atomic units (`ħ = m = e = 1`), by two
//! independent routes:
//!
//! * a **finite-difference** route: the second derivative is replaced by the
//!   three-point central difference on a uniform grid, Bloch boundary
//!   conditions add complex phase factors at the matrix corners, and the
//!   lowest eigenpairs of the resulting Hermitian tridiagonal-plus-corner
//!   matrix are computed with a shift-invert Lanczos iteration
//!   ([`eigensolver`]);
//! * an **analytic** route: the piecewise solution of the unit cell yields a
//!   transcendental dispersion relation `F(E) = cos(κc)` whose roots are
//!   bracketed and bisected to machine accuracy ([`analytic`]).
//!
//! The [`bands`] module orchestrates κ-sweeps, finite-ring spectra,
//! band-edge extraction and cross-validation of the two routes.
//!
//! The crate is `no_std` (with `alloc`); all floating-point math goes
//! through `libm`. Everything is deterministic: identical inputs produce
//! bit-identical outputs on the same build. All types are plain immutable
//! data (`Send + Sync`); independent κ solves can run concurrently.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod analytic;
pub mod bands;
pub mod eigensolver;
pub mod error;
mod fm;
pub mod hamiltonian;
mod linalg;
pub mod potentials;

pub use analytic::{BandEdge, BandEdges};
pub use bands::{BandStructure, ComparisonReport, ConvergenceReport};
pub use eigensolver::{EigenPair, Spectrum};
pub use error::{Error, Result};
pub use hamiltonian::{BlochSpec, DirichletHamiltonian, PeriodicHamiltonian};
pub use potentials::{
    DiracCombParams, GridSpec, KronigPenneyParams, Potential, SampledPotential,
};

/// Complex scalar used throughout (`num_complex::Complex<f64>`).
pub type Complex64 = num_complex::Complex<f64>;
