//! Convergence and integrability tools for harmonic analysis on real
//! spherical spaces: exact cone geometry, root data, compression cones,
//! lifted exponents, and Monte Carlo growth estimates.

pub mod cli;
pub mod cones;
pub mod error;
pub mod integrability;
pub mod linalg;
pub mod numerics;
pub mod rootsys;
pub mod spherical;

pub use error::{Error, Result};
