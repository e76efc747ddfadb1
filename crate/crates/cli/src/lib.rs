//! Configuration, document formats and command execution behind the
//! `revsym` binary.

pub mod config;
pub mod output;
pub mod run;
