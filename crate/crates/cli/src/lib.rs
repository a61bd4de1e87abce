//! Command-line front end: game files, analyses and their reports.

pub mod commands;
pub mod error;
pub mod gamefile;
pub mod report;

pub use error::CliError;
