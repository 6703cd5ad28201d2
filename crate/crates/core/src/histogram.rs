//! Quantile functions, Gaussian midway averaging and histogram specification.
//!
//! All columns of an image have the same number of samples, so a column's
//! cumulative histogram is represented exactly by its order statistics. The
//! midway of several such histograms is then the rank-wise weighted mean of
//! their sorted values, and specifying a column onto it is a rank lookup.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HistogramError {
    #[error("column is empty")]
    EmptyColumn,
    #[error("non-finite sample at row {0}")]
    NonFinite(usize),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("target decreases at index {0}")]
    NonMonotoneTarget(usize),
    #[error("sigma must be finite and non-negative, got {0}")]
    InvalidSigma(f64),
}

/// Discrete inverse cumulative histogram of one column.
///
/// `values[k]` is the k-th smallest sample and `ranks[k]` the row it came
/// from. Equal samples are ordered by row index.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFunction {
    values: Vec<f64>,
    ranks: Vec<usize>,
}

impl QuantileFunction {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Scatters sorted `target` values back to row order using this column's ranks.
    ///
    /// The caller guarantees `target` has the same length.
    pub(crate) fn scatter_into(&self, target: &[f64], out: &mut [f64]) {
        for (&row, &v) in self.ranks.iter().zip(target) {
            out[row] = v;
        }
    }

    /// The original column, reconstructed from values and ranks.
    pub fn to_column(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.scatter_into(&self.values, &mut out);
        out
    }
}

pub fn quantile_function(column: &[f64]) -> Result<QuantileFunction, HistogramError> {
    if column.is_empty() {
        return Err(HistogramError::EmptyColumn);
    }
    if let Some(row) = column.iter().position(|v| !v.is_finite()) {
        return Err(HistogramError::NonFinite(row));
    }
    Ok(sorted_unchecked(column))
}

pub(crate) fn sorted_unchecked(column: &[f64]) -> QuantileFunction {
    let mut pairs: Vec<(f64, usize)> = column.iter().copied().zip(0..).collect();
    // (value, row) keys are distinct, so an unstable sort is still deterministic
    // and equivalent to a stable sort by value.
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (values, ranks) = pairs.into_iter().unzip();
    QuantileFunction { values, ranks }
}

/// Truncated Gaussian weights over column offsets `-radius..=radius`, summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightKernel {
    sigma: f64,
    radius: usize,
    weights: Vec<f64>,
}

impl WeightKernel {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Weights indexed by `offset + radius`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_identity(&self) -> bool {
        self.radius == 0
    }

    /// `(offset, weight)` pairs from `-radius` to `radius`.
    pub fn taps(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        let r = self.radius as isize;
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (i as isize - r, w))
    }
}

/// Gaussian kernel with standard deviation `sigma`, truncated at
/// `max(1, ceil(4 sigma))` and renormalized. `sigma = 0` gives the identity kernel.
pub fn gaussian_kernel(sigma: f64) -> Result<WeightKernel, HistogramError> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(HistogramError::InvalidSigma(sigma));
    }
    if sigma == 0.0 {
        return Ok(WeightKernel {
            sigma,
            radius: 0,
            weights: vec![1.0],
        });
    }
    let radius = ((4.0 * sigma).ceil() as usize).max(1);
    let half: Vec<f64> = (0..=radius)
        .map(|j| (-((j * j) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let mut weights: Vec<f64> = half.iter().rev().chain(&half[1..]).copied().collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(WeightKernel {
        sigma,
        radius,
        weights,
    })
}

/// Rank-wise weighted average of quantile functions.
///
/// `qfs[j]` is weighted by `kernel.weights()[j]`. The result is non-decreasing.
pub fn midway_quantiles(
    qfs: &[&QuantileFunction],
    kernel: &WeightKernel,
) -> Result<Vec<f64>, HistogramError> {
    midway(qfs, kernel.weights())
}

/// Rank-wise average of any number of quantile functions with the given
/// non-negative weights (not renormalized).
pub fn midway(qfs: &[&QuantileFunction], weights: &[f64]) -> Result<Vec<f64>, HistogramError> {
    if qfs.len() != weights.len() || qfs.is_empty() {
        return Err(HistogramError::LengthMismatch {
            expected: weights.len(),
            found: qfs.len(),
        });
    }
    let m = qfs[0].len();
    if let Some(bad) = qfs.iter().find(|q| q.len() != m) {
        return Err(HistogramError::LengthMismatch {
            expected: m,
            found: bad.len(),
        });
    }
    let mut out = vec![0.0; m];
    accumulate_midway(qfs.iter().copied().zip(weights.iter().copied()), &mut out);
    Ok(out)
}

/// `out[k] = sum_j w_j * q_j.values[k]`. Lengths are the caller's responsibility.
pub(crate) fn accumulate_midway<'a>(
    weighted: impl IntoIterator<Item = (&'a QuantileFunction, f64)>,
    out: &mut [f64],
) {
    out.fill(0.0);
    for (qf, w) in weighted {
        for (acc, &v) in out.iter_mut().zip(&qf.values) {
            *acc += w * v;
        }
    }
}

/// Gives `column` the histogram described by the sorted `target`: the sample
/// of stable rank k receives `target[k]`.
pub fn specify(column: &[f64], target: &[f64]) -> Result<Vec<f64>, HistogramError> {
    if column.len() != target.len() {
        return Err(HistogramError::LengthMismatch {
            expected: column.len(),
            found: target.len(),
        });
    }
    if let Some(k) = target.windows(2).position(|w| w[1] < w[0]) {
        return Err(HistogramError::NonMonotoneTarget(k + 1));
    }
    let qf = quantile_function(column)?;
    let mut out = vec![0.0; column.len()];
    qf.scatter_into(target, &mut out);
    Ok(out)
}
