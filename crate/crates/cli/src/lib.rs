//! Library side of the `dressage` command-line tool.

pub mod commands;
pub mod config;
pub mod report;
pub mod suite;
