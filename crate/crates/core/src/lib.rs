//! Closed-form RF models and network algebra for capped coplanar waveguides
//! in wafer-level packages, plus the electrostatic MEMS varactor they carry.
//!
//! Everything here is `no_std` (with `alloc`). File formats, CLI and the
//! parallel sweep driver live in the `wlpkit` crate.

#![no_std]

extern crate alloc;

pub mod consts;
pub mod elliptic;
pub mod em_models;
mod error;
pub mod geometry;
pub mod network;
pub mod parasitics;
pub mod sweep;
pub mod varactor;

pub use error::{Error, Result};
pub use num_complex::Complex64;
