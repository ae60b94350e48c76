//! Site description files, reports and the subcommands of the `cdsite` binary.

pub mod commands;
pub mod document;
pub mod report;
