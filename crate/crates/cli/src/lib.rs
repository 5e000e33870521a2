//! Configuration-driven front end for the `flipmode` library.
//!
//! A scenario file fixes the grid, mode basis, Gaussian state and pixel
//! layout; each subcommand turns it into a deterministic JSON report.

pub mod commands;
pub mod config;
pub mod error;
pub mod scenario;

pub use commands::{analyze, degree, export_modes, multi, render, run, ExportFormat, Outcome};
pub use config::ScenarioConfig;
pub use error::CliError;
