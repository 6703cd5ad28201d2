//! Evaluation metrics: root-mean-square error and isotropic total variation.

use thiserror::Error;

use crate::image::Image;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
pub struct DimensionMismatch {
    pub left_w: usize,
    pub left_h: usize,
    pub right_w: usize,
    pub right_h: usize,
}

fn check_shape(a: &Image, b: &Image) -> Result<(), DimensionMismatch> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(DimensionMismatch {
            left_w: a.width(),
            left_h: a.height(),
            right_w: b.width(),
            right_h: b.height(),
        })
    }
}

pub fn rmse(a: &Image, b: &Image) -> Result<f64, DimensionMismatch> {
    check_shape(a, b)?;
    let sse: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok((sse / a.data().len() as f64).sqrt())
}

/// RMSE after subtracting each image's own mean.
pub fn rmse_mean_aligned(a: &Image, b: &Image) -> Result<f64, DimensionMismatch> {
    check_shape(a, b)?;
    let (ma, mb) = (a.mean(), b.mean());
    let sse: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| {
            let d = (x - ma) - (y - mb);
            d * d
        })
        .sum();
    Ok((sse / a.data().len() as f64).sqrt())
}

/// Sum of forward-difference gradient magnitudes. Differences that would
/// leave the image (last row, last column) are taken as zero.
pub fn tv_norm(img: &Image) -> f64 {
    let (w, h) = (img.width(), img.height());
    let data = img.data();
    let mut total = 0.0;
    for row in 0..h {
        for col in 0..w {
            let v = data[row * w + col];
            let down = if row + 1 < h {
                data[(row + 1) * w + col] - v
            } else {
                0.0
            };
            let right = if col + 1 < w {
                data[row * w + col + 1] - v
            } else {
                0.0
            };
            total += down.hypot(right);
        }
    }
    total
}

/// Sum of absolute differences between horizontally adjacent pixels.
pub fn horizontal_tv(img: &Image) -> f64 {
    (0..img.height())
        .map(|r| {
            img.row(r)
                .windows(2)
                .map(|p| (p[1] - p[0]).abs())
                .sum::<f64>()
        })
        .sum()
}
