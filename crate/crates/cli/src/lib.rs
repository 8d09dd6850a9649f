//! Pipeline commands behind the `thumbscope` binary: ingest, extract,
//! themes, compare, performance, temporal, inspect and validate-sidecar.
//! Each command reads its inputs from, and writes its outputs to, the
//! configured output directory, so they chain without extra arguments.

pub mod commands;
pub mod config;
pub mod error;
pub mod svg;
pub mod synth;

pub use config::RunConfig;
pub use error::{CliError, Result};
