//! Reproducible simulation of one- and two-type Richardson growth on Z^d.
//!
//! Edge passage times are exponential and produced by a stateless
//! counter-based generator ([`weights`]), so every run is a deterministic
//! function of `(seed, replication)` and runs over overlapping domains share
//! weights on shared edges.

pub mod calibration;
pub mod competition;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod fpp;
pub mod hull;
pub mod lattice;
pub mod stats;
pub mod weights;

pub use error::{Error, Result};
