//! Column-wise linear non-uniformity simulator.
//!
//! `out(x, y) = clean(x, y) * g(y) + b(y) + eta(x, y)` with
//! `g ~ N(1, gain_std^2)`, `b ~ N(0, offset_std^2)` drawn once per column and
//! `eta ~ N(0, noise_std^2)` drawn per pixel.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)`. Draw order is
//! fixed: all gains left to right, then all offsets, then the noise in
//! row-major order. Changing any of this changes every simulated image.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::Image;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulateError {
    #[error("{name} must be finite and non-negative, got {value}")]
    BadStd { name: &'static str, value: f64 },
    #[error("ground truth has {found} columns, image has {expected}")]
    WidthMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuParams {
    pub gain_std: f64,
    pub offset_std: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for NuParams {
    fn default() -> Self {
        Self {
            gain_std: 0.05,
            offset_std: 0.05,
            noise_std: 0.01,
            seed: 0,
        }
    }
}

impl NuParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<(), SimulateError> {
        for (name, value) in [
            ("gain_std", self.gain_std),
            ("offset_std", self.offset_std),
            ("noise_std", self.noise_std),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(SimulateError::BadStd { name, value });
            }
        }
        Ok(())
    }
}

/// The per-column gains and offsets that were applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuGroundTruth {
    pub gains: Vec<f64>,
    pub offsets: Vec<f64>,
}

impl NuGroundTruth {
    /// Undoes the linear part: `(z - b) / g`. Exact only without noise.
    pub fn invert(&self, observed: &Image) -> Result<Image, SimulateError> {
        let w = observed.width();
        if self.gains.len() != w || self.offsets.len() != w {
            return Err(SimulateError::WidthMismatch {
                expected: w,
                found: self.gains.len(),
            });
        }
        Ok(Image::from_fn(w, observed.height(), |r, c| {
            (observed.get(r, c) - self.offsets[c]) / self.gains[c]
        })
        .expect("finite gains keep the image valid"))
    }
}

pub fn simulate_nu(
    clean: &Image,
    params: &NuParams,
) -> Result<(Image, NuGroundTruth), SimulateError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let gain = Normal::new(1.0, params.gain_std).expect("validated std");
    let offset = Normal::new(0.0, params.offset_std).expect("validated std");
    let noise = Normal::new(0.0, params.noise_std).expect("validated std");

    let w = clean.width();
    let gains: Vec<f64> = (0..w).map(|_| gain.sample(&mut rng)).collect();
    let offsets: Vec<f64> = (0..w).map(|_| offset.sample(&mut rng)).collect();
    let data = clean
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let c = i % w;
            v * gains[c] + offsets[c] + noise.sample(&mut rng)
        })
        .collect();
    let observed = Image::new(w, clean.height(), data).expect("finite draws keep the image valid");
    Ok((observed, NuGroundTruth { gains, offsets }))
}
