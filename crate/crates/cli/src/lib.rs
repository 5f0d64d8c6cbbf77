//! Library behind the `weakcrit` executable: configuration, subcommands and
//! the randomized reference-simulation suites.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
pub mod suites;

pub use app::run;
pub use config::RunConfig;
pub use error::CliError;
