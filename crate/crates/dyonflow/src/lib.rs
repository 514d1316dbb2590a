//! dyonflow — static dyonic black-hole scalar flows.
//!
//! The crate builds the scalar sector of a four-dimensional gravity model
//! (Kahler geometry, superpotential, gauge kinetic functions, dyonic
//! charges), evaluates the three potentials that drive radial flows (scalar,
//! black-hole, effective), integrates the flow equations two independent
//! ways (a contraction-certified fixed-point iteration and an adaptive
//! Runge-Kutta integrator), and audits the results: near-horizon behaviour,
//! asymptotic fall-off, gauge-field identities, and finiteness of the total
//! energy.
//!
//! Start from [`model::ModelSpec`] for the physics data, [`background::Background`]
//! for the radial geometry, and [`flow`] for the integrators. The `examples/`
//! directory has one runnable program per capability; the `dyonflow` binary
//! exposes the same pipelines as subcommands driven by a config file.

pub mod background;
pub mod cli;
pub mod config;
pub mod critical;
pub mod diff;
pub mod energy;
pub mod error;
pub mod flow;
pub mod gauge;
pub mod kahler;
pub mod model;
pub mod norms;
pub mod poly;
pub mod potentials;
pub mod quad;
pub mod sampling;

pub use error::{Error, Result};
