//! Numerical laboratory for the time-symmetric double-solution picture.
//!
//! The crate evolves guiding waves, integrates pilot-wave trajectories in
//! both the subluminal and tachyonic regimes, builds Lane-Emden soliton
//! near-fields around them and evaluates retarded/advanced far-fields along
//! the resulting worldlines. Scenario harnesses (beam splitter, EPR pair,
//! Cauchy-surface recording) sit on top and are driven by [`config`].
//!
//! Units are ħ = c = 1 with metric signature (+,−,−,−) everywhere.

pub mod acceptance;
pub mod config;
pub mod farfield;
pub mod guidance;
pub mod numerics;
pub mod output;
pub mod scenarios;
pub mod soliton;
pub mod spacetime;
pub mod wave;

pub use num_complex::Complex64;
pub use spacetime::{minkowski_dot, FourVector};

/// Version string embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
