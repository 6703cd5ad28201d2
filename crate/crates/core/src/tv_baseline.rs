//! Column-offset baseline: add a constant to each column so that horizontal
//! total variation is minimized, keeping the image mean.
//!
//! For adjacent columns `c_y`, `c_{y+1}` the shift minimizing
//! `sum_x |c_{y+1}(x) + delta - c_y(x)|` is the median of `c_y - c_{y+1}`.
//! Offsets accumulate as `k(y+1) = k(y) + delta(y)`, and `k(0)` is chosen so
//! the offsets average to zero.

use thiserror::Error;

use crate::image::{Image, Orientation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("need at least two columns, got {0}")]
    TooNarrow(usize),
}

/// Per-column additive constants `k(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetVector {
    pub offsets: Vec<f64>,
}

/// Median with the midpoint convention for even counts. Reorders `samples`.
pub fn median_in_place(samples: &mut [f64]) -> f64 {
    assert!(!samples.is_empty(), "median of empty sample");
    let n = samples.len();
    let mid = n / 2;
    let (lower, upper, _) = samples.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// `delta(y)` for each adjacent column pair `(y, y+1)`.
pub fn column_deltas(img: &Image) -> Result<Vec<f64>, BaselineError> {
    let w = img.width();
    if w < 2 {
        return Err(BaselineError::TooNarrow(w));
    }
    let mut diffs = vec![0.0; img.height()];
    Ok((0..w - 1)
        .map(|y| {
            for (x, d) in diffs.iter_mut().enumerate() {
                *d = img.get(x, y) - img.get(x, y + 1);
            }
            median_in_place(&mut diffs)
        })
        .collect())
}

pub fn column_offsets(img: &Image) -> Result<OffsetVector, BaselineError> {
    let deltas = column_deltas(img)?;
    let mut offsets = Vec::with_capacity(deltas.len() + 1);
    let mut k = 0.0;
    offsets.push(k);
    for d in deltas {
        k += d;
        offsets.push(k);
    }
    let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
    for k in &mut offsets {
        *k -= mean;
    }
    Ok(OffsetVector { offsets })
}

pub fn tv_correct(img: &Image) -> Result<Image, BaselineError> {
    let OffsetVector { offsets } = column_offsets(img)?;
    let w = img.width();
    let data = img
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| v + offsets[i % w])
        .collect();
    Ok(Image::new(w, img.height(), data).expect("finite offsets keep the image valid"))
}

/// Applies the baseline to columns, or to lines through transposition.
pub fn tv_correct_oriented(img: &Image, orientation: Orientation) -> Result<Image, BaselineError> {
    match orientation {
        Orientation::Columns => tv_correct(img),
        Orientation::Lines => Ok(tv_correct(&img.transpose())?.transpose()),
    }
}
