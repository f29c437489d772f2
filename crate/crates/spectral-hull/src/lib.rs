//! Verification harness, JSON formats and command-line front end for the
//! spectral hull oracles in `spectral-hull-core`.

pub mod cli;
pub mod harness;
pub mod io;

pub use spectral_hull_core as core;
