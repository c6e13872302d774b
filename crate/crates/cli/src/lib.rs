//! Command-line front end: argument/config resolution, scenario runner,
//! plot-script emission, and the self-verification suite.

pub mod config;
pub mod plot;
pub mod runner;
pub mod verify;
