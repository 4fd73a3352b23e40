//! File formats, experiment harness and command implementations behind the
//! `ensk` binary.

pub mod commands;
pub mod error;
pub mod io;
pub mod seed;
pub mod simulation;

pub use error::AppError;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
