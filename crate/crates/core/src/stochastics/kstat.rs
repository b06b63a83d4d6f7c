//! Unbiased cumulant estimators (k-statistics) with batch-means standard errors.

use crate::error::{Result, ZennError};

pub const MAX_ORDER: usize = 4;

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// `NaN` when the sample is too short to form batches.
    pub stderr: f64,
}

impl Estimate {
    /// `|value - target| / stderr`.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.stderr
    }

    /// Whether `target` lies within `k` standard errors.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

/// k-statistics `k_1..k_max` of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct KStatistics {
    pub n: usize,
    estimates: Vec<Estimate>,
}

impl KStatistics {
    /// Estimate of the cumulant of order `r` (1-based).
    pub fn order(&self, r: usize) -> Estimate {
        self.estimates[r - 1]
    }

    pub fn max_order(&self) -> usize {
        self.estimates.len()
    }
}

/// Point k-statistics `k_1..k_max` (no standard errors).
fn point(sample: &[f64], max_order: usize) -> Vec<f64> {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for &x in sample {
        let d = x - mean;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    let (m2, m3, m4) = (s2 / n, s3 / n, s4 / n);
    let mut k = vec![mean];
    if max_order >= 2 {
        k.push(n / (n - 1.0) * m2);
    }
    if max_order >= 3 {
        k.push(n * n / ((n - 1.0) * (n - 2.0)) * m3);
    }
    if max_order >= 4 {
        k.push(n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0)));
    }
    k
}

/// Splits `0..n` into `⌊√n⌋` contiguous batches of near-equal size.
fn batch_bounds(n: usize) -> Vec<(usize, usize)> {
    let b = (n as f64).sqrt().floor() as usize;
    (0..b).map(|i| (i * n / b, (i + 1) * n / b)).collect()
}

/// Batch-means standard error of `stat` over `⌊√n⌋` batches.
pub fn batched_stderr<F>(sample: &[f64], min_batch: usize, stat: F) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let bounds = batch_bounds(sample.len());
    if bounds.len() < 2 || bounds.iter().any(|(a, b)| b - a < min_batch) {
        return f64::NAN;
    }
    let values: Vec<f64> = bounds.iter().map(|&(a, b)| stat(&sample[a..b])).collect();
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (var / m).sqrt()
}

/// Unbiased estimates of the cumulants of orders `1..=max_order` (at most 4).
///
/// `k_1` is the mean; `k_2, k_3, k_4` are Fisher's k-statistics. Standard
/// errors come from the spread of the same statistic over `⌊√n⌋` batches.
pub fn k_statistics(sample: &[f64], max_order: usize) -> Result<KStatistics> {
    if max_order == 0 || max_order > MAX_ORDER {
        return Err(ZennError::InvalidParameter(format!("cumulant order must be in 1..=4, got {max_order}")));
    }
    // k_r is defined from r observations on (k_1 from one).
    if sample.len() < max_order {
        return Err(ZennError::SampleTooShort { needed: max_order, got: sample.len() });
    }
    let values = point(sample, max_order);
    let estimates = values
        .iter()
        .enumerate()
        .map(|(i, &value)| Estimate {
            value,
            stderr: batched_stderr(sample, max_order + 1, |s| point(s, i + 1)[i]),
        })
        .collect();
    Ok(KStatistics { n: sample.len(), estimates })
}

/// Excess kurtosis `k_4 / k_2²` with batch-means standard error.
pub fn excess_kurtosis(sample: &[f64]) -> Result<Estimate> {
    if sample.len() < 5 {
        return Err(ZennError::SampleTooShort { needed: 5, got: sample.len() });
    }
    let ratio = |s: &[f64]| {
        let k = point(s, 4);
        k[3] / (k[1] * k[1])
    };
    Ok(Estimate { value: ratio(sample), stderr: batched_stderr(sample, 5, ratio) })
}
