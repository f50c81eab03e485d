//! Simulation and analysis of subcycle quantum electro-optic tomography.

pub mod coefficients;
pub mod commands;
pub mod config;
pub mod decomposition;
pub mod error;
pub mod io;
pub mod model;
pub mod numerics;
pub mod presets;
pub mod quasiprob;
pub mod tomography;
pub mod units;

pub use error::{Error, Result};
