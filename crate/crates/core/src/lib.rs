//! Exact certification toolkit for chain transitivity, shadowing and
//! ω-limit sets of piecewise-linear interval maps and one-sided shifts.
//!
//! Everything that ends up in a certificate is computed with exact
//! rationals ([`numeric::Scalar`]); finite-resolution claims state their
//! resolution explicitly.

pub mod chain;
pub mod counterexamples;
pub mod graph;
pub mod numeric;
pub mod omega;
pub mod par;
pub mod pseudo_orbit;
pub mod shadowing;
pub mod symbolic;

use thiserror::Error;

pub use numeric::{q, Budget, Interval, PlMap, Scalar};
pub use symbolic::{ShiftPresentation, Word};

/// Crate-wide error, wrapping the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Numeric(#[from] numeric::NumericError),
    #[error(transparent)]
    Shift(#[from] symbolic::ShiftError),
    #[error(transparent)]
    Orbit(#[from] pseudo_orbit::OrbitError),
    #[error(transparent)]
    Chain(#[from] chain::ChainError),
    #[error(transparent)]
    Shadow(#[from] shadowing::ShadowError),
    #[error(transparent)]
    Realize(#[from] omega::RealizeError),
}
