//! Command-line front end: function-spec parsing, the `classify`, `certify`,
//! `orbit` and `oracle` commands, and their JSON and CSV output.

pub mod commands;
pub mod grammar;
pub mod report;

pub use commands::{run, Outcome};
