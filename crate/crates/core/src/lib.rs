//! Certification harness for exact non-stationary solutions of the
//! incompressible Navier-Stokes equations on periodic cells.
//!
//! The library carries five closed-form solution families (the decaying 2D
//! Taylor vortex, the 3D ABC/Beltrami flow, their time-forced variants, and
//! an ABC flow driven by an exponentially decaying uniform force), spectral
//! and finite-difference operators on period-2 rectilinear grids, a Leray
//! projector with pressure-Poisson reconstruction, heat-kernel/Duhamel
//! evolution, and free-space integral oracles that cross-check the spectral
//! paths. The `verify` module measures momentum, divergence, pressure and
//! projection residuals of every family against tight tolerances and emits
//! structured reports; `cli` exposes the whole pipeline as the `ns-verify`
//! binary.

pub mod cli;
pub mod error;
pub mod evolution;
pub mod fields;
pub mod operators;
pub mod solutions;
pub mod verify;

pub(crate) mod quadrature;

pub use error::{Error, Result};
