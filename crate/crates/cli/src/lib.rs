//! Subcommands of the `qbigraph` binary.
//!
//! Each `cmd_*` function takes a fully merged [`RunConfig`] and returns the
//! exact bytes to emit together with an exit code, so runs can be reproduced
//! and compared without spawning a process.

pub mod commands;
pub mod config;

use qbigraph::graph::GraphError;
use qbigraph::params::ParamsError;
use qbigraph::protocols::ProtocolError;
use thiserror::Error;

pub use commands::{cmd_entanglement, cmd_parity, cmd_sweep, cmd_validate, Report};
pub use config::{MethodChoice, OutputFormat, RunConfig, SweepSpec, Target};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no graph given; pass --graph or set graph= in the config file")]
    MissingGraph,
    #[error("no qubit given; pass --qubit or set qubit= in the config file")]
    MissingQubit,
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
    #[error("invalid angles: {0}")]
    Params(#[from] ParamsError),
    #[error("config key {key}: {message}")]
    Config { key: String, message: String },
    #[error("invalid sweep axes {axes:?}: {reason}")]
    InvalidSweepAxis { axes: String, reason: String },
    #[error("invalid sweep range: start={start}, stop={stop}, step={step} (need step > 0 and start <= stop)")]
    InvalidSweepRange { start: f64, stop: f64, step: f64 },
    #[error("{command} cannot write {format} output")]
    UnsupportedFormat {
        command: &'static str,
        format: &'static str,
    },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
