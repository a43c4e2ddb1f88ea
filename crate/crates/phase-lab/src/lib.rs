//! Numerical laboratory for geometric phases of parametrized quantum systems.
//!
//! The crate computes Berry phases of pure states and Uhlmann phases of
//! full-rank density matrices transported around closed loops in parameter
//! space, for a small zoo of exactly solvable model families:
//!
//! - bosonic coherent states on a truncated Fock space,
//! - fermionic coherent states with Grassmann-valued displacement,
//! - spin-j paramagnets in a rotating magnetic field,
//! - generic unitary families `ρ(t) = e^{tG} ρ₀ e^{-tG}`,
//! - the one-dimensional Hilbert space as the excluded special case.
//!
//! Each family carries closed-form phase expressions that serve as oracles
//! for the discretized estimators, and the zero-temperature limit of the
//! Uhlmann phase is checked against the ground-state Berry phase.
//!
//! Entry points:
//!
//! - [`holonomy::berry_phase_wilson`] — gauge-invariant Wilson-loop Berry phase,
//! - [`holonomy::uhlmann_holonomy`] / [`holonomy::uhlmann_phase`] — discretized
//!   path-ordered Uhlmann holonomy with two independent estimators,
//! - [`holonomy::correspondence_check`] — Uhlmann → Berry sweep over β,
//! - [`purify::transport_purification`] — system⊗ancilla purified-state transport,
//! - [`cli::run`] — batch front-end used by the `phase-lab` binary.
//!
//! See the crate `examples/` directory for one runnable example per major
//! capability.

pub mod cli;
pub mod grassmann;
pub mod holonomy;
pub mod linops;
pub mod models;
pub mod purify;
pub mod selftest;
pub mod util;

pub use linops::{ComplexMatrix, SpectralDecomposition, C64};
pub use models::{DensityMatrix, LoopKind, ModelFamily, ParameterLoop};
