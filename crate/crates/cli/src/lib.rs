//! Command-line front end for the reservation knapsack toolkit.

pub mod args;
pub mod checks;
pub mod commands;
pub mod error;
pub mod gen;
pub mod io;
pub mod report;

pub use commands::{execute, Outcome};
pub use error::{CliError, CliResult};
