//! One-dimensional finite-volume solver for two-fluid compressible flow in
//! ducts of piecewise-constant cross section.
//!
//! The scheme combines a well-balanced linearized interface solver (exact on
//! standing waves over area jumps) with an arbitrary-Lagrangian-Eulerian
//! treatment of the fluid-fluid contact and a Glimm random-sampling remap,
//! so material interfaces stay one cell wide for all time.

pub mod config;
pub mod eos;
pub mod error;
pub mod exact;
pub mod profile;
pub mod riemann;
pub mod scheme;
pub mod sim;
pub mod state;

pub use error::{Result, SimError};
