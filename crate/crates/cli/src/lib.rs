//! Command-line front end: monodromy files, table rendering and the
//! subcommands behind the `lefschetz` binary.

pub mod commands;
pub mod file;
pub mod table;
