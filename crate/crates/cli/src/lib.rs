//! Command line and HTTP front end for `vga-core`.

pub mod commands;
pub mod error;
pub mod output;
pub mod server;
pub mod session;

pub use commands::run;
pub use error::CliError;
