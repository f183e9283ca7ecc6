//! Configuration, output formats and subcommands for the `continuum-emu`
//! binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_run, cmd_sweep, cmd_validate, exit, RunArgs, SweepArgs};
