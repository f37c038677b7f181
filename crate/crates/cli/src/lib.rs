//! Configuration, file formats and experiment drivers for the
//! `active-scalar` command-line tool.

pub mod commands;
pub mod config;
pub mod output;
pub mod selftest;
pub mod snapshot;
