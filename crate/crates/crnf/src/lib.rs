//! File formats, floating-point probes and the command-line front end for `crnf_core`.

pub mod cli;
pub mod error;
pub mod io;
pub mod probe;
pub mod regularity;

pub use error::CliError;
