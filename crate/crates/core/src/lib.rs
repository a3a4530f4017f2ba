//! Tuning of Butterworth-filtered back-projection with a no-reference quality score.
//!
//! - [`kernel`]: positive definite kernels, interpolants and the power function.
//! - [`greedy`]: P-greedy and f-greedy site selection.
//! - [`bayes_opt`]: kernel-based Bayesian optimization on a candidate grid.
//! - [`pique`]: the PIQUE no-reference image quality score.
//! - [`tomo`]: phantoms, Radon transform, Butterworth×ramp filtering and FBP.
//! - [`objective`]: the mean-slice PIQUE objective, grid sweeps and tuning runs.
//! - [`volume_io`]: the `SPVOL1` volume container and PGM export.

pub mod bayes_opt;
pub mod error;
pub mod greedy;
pub mod image;
pub mod kernel;
mod linalg;
pub mod objective;
pub mod pique;
pub mod points;
pub mod tomo;
pub mod volume_io;

pub use error::{Error, Result};
pub use image::GrayImage;
pub use points::PointSet;
