//! The `sepsys` document format and the reports behind the `sepsys`
//! command-line tool.

pub mod commands;
pub mod format;
