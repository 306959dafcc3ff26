//! File formats and command-line front end for `epigraph-core`.
//!
//! * [`config`]: flat `key = value` run configuration.
//! * [`db`]: contact database ingestion (vertex and edge CSV tables).
//! * [`export`]: snapshot directories, trajectories and ABC results as CSV.
//! * [`cli`]: the `simulate`, `infer` and `match` subcommands.

pub mod cli;
pub mod config;
pub mod db;
pub mod export;
