//! Support library for the `underlay` command line tool: config file
//! parsing, output manifests and the CSV reader/writer shared between the
//! binary and its tests.

pub mod config;
pub mod output;
