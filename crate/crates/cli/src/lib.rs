//! File striping, repair, simulation and bound tables on top of `metrrc`.

pub mod chunk;
pub mod coder;
pub mod commands;
pub mod error;
pub mod packing;

pub use error::{CliError, Result};
