//! Command-line front end and HTTP service for `helpsys-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod server;

pub use cli::Cli;
pub use commands::{load_engine, run};
pub use config::AppConfig;
