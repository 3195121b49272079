//! Spectral constants and reduced Ginzburg-Landau energies for a 2D
//! superconductor under a step magnetic field.
//!
//! The field takes the value 1 on one side of a barrier line and
//! `a ∈ [-1,1)\{0}` on the other. This crate computes the quantities that
//! govern where superconductivity survives as the field strength grows:
//!
//! - [`halfline`]: the half-line oscillator family with Robin boundary
//!   condition, its band functions and the de Gennes curve `Θ(γ)`;
//! - [`fiber`]: the whole-line fiber operator of the step field, its band
//!   function `μ_a(ξ)` and the barrier constant `β_a`;
//! - [`gl1d`]: effective 1D Ginzburg-Landau energies on the line and
//!   half-line, and the surface energy `E_surf(b)`;
//! - [`strip2d`]: the reduced 2D Ginzburg-Landau energy on truncated strips
//!   with a gauge-covariant link discretization;
//! - [`barrier`]: the barrier energy per unit length `𝔢_a(b)` extrapolated
//!   from a strip-width schedule, with analytic bounds;
//! - [`phase`]: critical field thresholds and the phase-diagram
//!   classification with the leading-order energy `E^L_a(b)`;
//! - [`numerics`]: the shared solver kernels (tridiagonal eigensolver,
//!   bracketed scalar minimization, projected quasi-Newton descent).
//!
//! The crate is `no_std` (with `alloc`); enable the `std` feature to get
//! `std::error::Error` on [`Error`].

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod barrier;
pub mod fiber;
pub mod gl1d;
pub mod halfline;
pub mod numerics;
pub mod phase;
pub mod strip2d;

use alloc::string::String;

/// Errors shared by all solver modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid input (NaN/Inf entries, malformed grids, empty data).
    Input(String),
    /// A parameter lies outside the admissible range of the operation.
    Domain(String),
    /// An iterative solver failed to reach its tolerance.
    Convergence(String),
    /// The computed state carries non-negligible mass at a truncation
    /// boundary; a larger cutoff is needed.
    Truncation(String),
    /// A quantity needed for a derived formula is too small to divide by.
    Conditioning(String),
    /// A schedule (grid refinement, strip heights) was exhausted before the
    /// stopping gap was met.
    Resolution(String),
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::Input(m) => write!(f, "invalid input: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Convergence(m) => write!(f, "convergence failure: {m}"),
            Error::Truncation(m) => write!(f, "truncation too small: {m}"),
            Error::Conditioning(m) => write!(f, "ill-conditioned: {m}"),
            Error::Resolution(m) => write!(f, "resolution failure: {m}"),
        }
    }
}

#[cfg(any(test, feature = "std"))]
impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
