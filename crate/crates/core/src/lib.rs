#![no_std]
extern crate alloc;

pub mod error;
pub mod hull;
pub mod invariance;
pub mod linalg;
pub mod oracle;
pub mod relax;
pub mod sets;
pub mod system;

pub use error::{Error, Result};
pub use system::{ConeDesc, PointV, PointW, SpectralSystem};

/// Slack used when a polar-cone or range-cone constraint is relaxed.
pub const EPS: f64 = 1e-8;
