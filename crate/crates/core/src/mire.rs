//! Midway infrared equalization.
//!
//! Every column is given the Gaussian-weighted midway histogram of its
//! neighborhood: the target quantile function of column `i` is
//! `sum_j w_j * Q_{i+j}` over `j = -N..=N`, with out-of-range columns
//! mirrored back into the image, and the column is then specified onto that
//! target. Line stripes are handled on the transposed image.
//!
//! The stripe-free image is assumed to be the smoothest one, so the
//! smoothing width can be chosen by minimizing total variation over sigma.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::histogram::{
    accumulate_midway, gaussian_kernel, sorted_unchecked, HistogramError, QuantileFunction,
    WeightKernel,
};
use crate::image::{reflect_index, Image, Orientation};
use crate::metrics::tv_norm;

/// Default sigma candidates for the automatic search.
pub const DEFAULT_SIGMA_GRID: [f64; 10] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0];

/// Ternary refinement stops once the bracket is narrower than this.
pub const REFINE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MireError {
    #[error(transparent)]
    Histogram(#[from] HistogramError),
    #[error("sigma grid is empty")]
    EmptyGrid,
    #[error("sigma grid must be ascending with finite non-negative values, bad entry at {0}")]
    BadGrid(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MireConfig {
    pub sigma: f64,
    pub orientation: Orientation,
}

impl MireConfig {
    pub fn new(sigma: f64) -> Self {
        Self {
            sigma,
            orientation: Orientation::Columns,
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }
}

/// Sorted columns of one image, reusable across several sigmas.
#[derive(Debug, Clone)]
pub struct ColumnHistograms {
    width: usize,
    height: usize,
    columns: Vec<QuantileFunction>,
}

impl ColumnHistograms {
    /// Sorts every column of `img` (or every line, for [`Orientation::Lines`]).
    pub fn new(img: &Image, orientation: Orientation) -> Self {
        // Work on column-major data so each column is a contiguous slice.
        let (major, width, height) = match orientation {
            Orientation::Columns => (img.transpose(), img.width(), img.height()),
            Orientation::Lines => (img.clone(), img.height(), img.width()),
        };
        let columns = (0..width).map(|c| sorted_unchecked(major.row(c))).collect();
        Self {
            width,
            height,
            columns,
        }
    }

    pub fn columns(&self) -> &[QuantileFunction] {
        &self.columns
    }

    /// Equalized data laid out column-major (one contiguous run per column).
    fn equalize_major(&self, kernel: &WeightKernel) -> Vec<f64> {
        let (w, h) = (self.width, self.height);
        let mut out = vec![0.0; w * h];
        if kernel.is_identity() {
            for (qf, dst) in self.columns.iter().zip(out.chunks_exact_mut(h)) {
                qf.scatter_into(qf.values(), dst);
            }
            return out;
        }
        let mut target = vec![0.0; h];
        for (i, dst) in out.chunks_exact_mut(h).enumerate() {
            let neighbors = kernel.taps().map(|(offset, weight)| {
                (&self.columns[reflect_index(i as isize + offset, w)], weight)
            });
            accumulate_midway(neighbors, &mut target);
            self.columns[i].scatter_into(&target, dst);
        }
        out
    }

    /// Corrected image in the orientation of the original input.
    pub fn equalize(&self, kernel: &WeightKernel, orientation: Orientation) -> Image {
        let major = self.equalize_major(kernel);
        let (w, h) = (self.width, self.height);
        let as_rows = Image::new(h, w, major).expect("equalization keeps values finite");
        match orientation {
            // Rows of `as_rows` are the original columns.
            Orientation::Columns => as_rows.transpose(),
            // Rows of `as_rows` are the original lines.
            Orientation::Lines => as_rows,
        }
    }
}

pub fn mire_correct(img: &Image, cfg: &MireConfig) -> Result<Image, MireError> {
    let kernel = gaussian_kernel(cfg.sigma)?;
    if kernel.is_identity() {
        return Ok(img.clone());
    }
    Ok(ColumnHistograms::new(img, cfg.orientation).equalize(&kernel, cfg.orientation))
}

/// Outcome of the sigma search.
#[derive(Debug, Clone)]
pub struct SigmaSearchResult {
    pub best_sigma: f64,
    pub best_tv: f64,
    pub corrected: Image,
    /// Every evaluated `(sigma, tv_norm)`, sorted by sigma.
    pub trace: Vec<(f64, f64)>,
}

pub fn auto_sigma(img: &Image, grid: &[f64], refine: bool) -> Result<SigmaSearchResult, MireError> {
    auto_sigma_oriented(img, Orientation::Columns, grid, refine)
}

/// Picks the sigma whose corrected image has the least total variation.
///
/// All grid points are evaluated. With `refine`, a ternary search runs on
/// the grid neighbors of the best grid point until the bracket is narrower
/// than [`REFINE_TOLERANCE`]. Ties go to the smaller sigma.
pub fn auto_sigma_oriented(
    img: &Image,
    orientation: Orientation,
    grid: &[f64],
    refine: bool,
) -> Result<SigmaSearchResult, MireError> {
    validate_grid(grid)?;
    let histograms = ColumnHistograms::new(img, orientation);
    let tv_at = |sigma: f64| -> Result<f64, MireError> {
        let kernel = gaussian_kernel(sigma)?;
        Ok(tv_norm(&histograms.equalize(&kernel, orientation)))
    };

    let grid_tvs: Vec<f64> = grid
        .par_iter()
        .map(|&s| tv_at(s))
        .collect::<Result<_, _>>()?;
    // Keyed by the bit pattern so each sigma is evaluated once; non-negative
    // floats order the same as their bits.
    let mut evaluated: BTreeMap<u64, f64> = grid
        .iter()
        .zip(&grid_tvs)
        .map(|(s, &tv)| (s.to_bits(), tv))
        .collect();

    if refine && grid.len() > 1 {
        let best = argmin(grid.iter().copied().zip(grid_tvs.iter().copied()));
        let i = grid.iter().position(|&s| s == best.0).unwrap_or(0);
        let mut lo = grid[i.saturating_sub(1)];
        let mut hi = grid[(i + 1).min(grid.len() - 1)];
        let mut eval = |s: f64| -> Result<f64, MireError> {
            if let Some(&tv) = evaluated.get(&s.to_bits()) {
                return Ok(tv);
            }
            let tv = tv_at(s)?;
            evaluated.insert(s.to_bits(), tv);
            Ok(tv)
        };
        while hi - lo >= REFINE_TOLERANCE {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if eval(m1)? <= eval(m2)? {
                hi = m2;
            } else {
                lo = m1;
            }
        }
    }

    let trace: Vec<(f64, f64)> = evaluated
        .into_iter()
        .map(|(bits, tv)| (f64::from_bits(bits), tv))
        .collect();
    let (best_sigma, best_tv) = argmin(trace.iter().copied());
    let corrected = mire_correct(
        img,
        &MireConfig::new(best_sigma).with_orientation(orientation),
    )?;
    Ok(SigmaSearchResult {
        best_sigma,
        best_tv,
        corrected,
        trace,
    })
}

/// Smallest tv; the first (smallest sigma) wins ties when fed in sigma order.
fn argmin(points: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    points
        .fold(None, |best: Option<(f64, f64)>, p| match best {
            Some(b) if b.1 <= p.1 => Some(b),
            _ => Some(p),
        })
        .expect("non-empty trace")
}

fn validate_grid(grid: &[f64]) -> Result<(), MireError> {
    if grid.is_empty() {
        return Err(MireError::EmptyGrid);
    }
    for (i, &s) in grid.iter().enumerate() {
        if !s.is_finite() || s.is_sign_negative() || (i > 0 && s <= grid[i - 1]) {
            return Err(MireError::BadGrid(i));
        }
    }
    Ok(())
}
