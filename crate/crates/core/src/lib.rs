//! Simulation of a conditional phase gate between a Rydberg atom and a
//! microwave photon in a superconducting coplanar waveguide resonator.

pub mod cli;
pub mod constants;
pub mod cpwfield;
pub mod error;
pub mod evolve;
pub mod metrics;
pub mod model;
pub mod protocol;
pub mod qops;

pub use error::{Error, Result};
