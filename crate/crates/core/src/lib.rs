//! Single-frame removal of column and line fixed-pattern noise.
//!
//! The main entry point is [`mire::mire_correct`], which gives every column
//! the Gaussian-weighted midway histogram of its neighbors. [`mire::auto_sigma`]
//! picks the smoothing width by total-variation minimization, and
//! [`tv_baseline::tv_correct`] provides a column-offset baseline for comparison.

pub mod cli;
pub mod histogram;
pub mod image;
pub mod metrics;
pub mod mire;
pub mod report;
pub mod scene;
pub mod simulate;
pub mod tv_baseline;

pub use crate::image::{reflect_index, BitDepth, Image, ImageError, ImageFormat, Orientation};
pub use crate::mire::{auto_sigma, mire_correct, MireConfig, SigmaSearchResult};
