//! File formats, run configuration, parallel sweeps and the `wlpkit`
//! command line on top of [`wlpkit_core`].

pub mod cli;
pub mod config;
pub mod export;
pub mod parallel;
pub mod touchstone;

pub use wlpkit_core as core;
