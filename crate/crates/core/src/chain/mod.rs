//! Chain structure at finite resolution: ε-transition graphs over box
//! partitions and block graphs, two-sided ICT certification, finite-model
//! oracles for weak incompressibility, and asymptotic pseudo-orbits.

mod asymptotic;
mod finite_model;
mod partition;
mod transition;

use thiserror::Error;

pub use asymptotic::{
    build_asymptotic_pseudo_orbit_interval, build_asymptotic_pseudo_orbit_shift, omega_of_sequence_interval,
    omega_of_sequence_shift, AsymptoticPrefix,
};
pub use finite_model::{ict_finite, invariance_check_finite, wi_bruteforce, FiniteModel, MAX_SUBSET};
pub use partition::BoxPartition;
pub use transition::{
    attractor_free_check, build_block_graph, build_eps_graph, certify_blocks, certify_points, chain,
    chain_recurrent_vertices, ict_certificates, invariance_check_graph, is_ict, verdict_json, ChainCertificate,
    ChainStates, IctVerdict, Mode, Phase, TransitionGraph,
};

use crate::numeric::NumericError;
use crate::pseudo_orbit::OrbitError;
use crate::symbolic::ShiftError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("mode: {0}")]
    Mode(String),
    #[error("no path from vertex {from} to vertex {to}")]
    NoPath { from: usize, to: usize },
    #[error("size: {0}")]
    Size(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}
