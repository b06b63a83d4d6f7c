//! Width-doubling convergence of nested random networks.
//!
//! A single parameter sequence `θ_1, θ_2, …` is drawn once; the width-`N`
//! network uses its first `N` entries. For each `N` we record
//! `D(N) = max_{x ∈ grid} |f^{2N}(x) - f^N(x)|`.

use crate::activation::Activation;
use crate::error::{Result, ZennError};
use crate::stochastics::init::InitSpec;

/// Network family under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `Σ j^(-α) (w2 σ(w1 j x + b1) + b2)`.
    ZeNN { alpha: f64 },
    /// `N^(-β) Σ (w2 σ(w1 x + b1) + b2)`.
    Mlp { beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub widths: Vec<usize>,
    /// `D(N)` per width.
    pub sup_diff: Vec<f64>,
    /// Least-squares slope of `ln D` against `ln N`.
    pub slope: f64,
}

impl ConvergenceReport {
    pub fn log2_sup_diff(&self) -> Vec<f64> {
        self.sup_diff.iter().map(|d| d.log2()).collect()
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn validate(widths: &[usize], grid: &[f64]) -> Result<()> {
    if widths.is_empty() || grid.is_empty() {
        return Err(ZennError::Empty("widths and grid must be nonempty"));
    }
    if widths[0] == 0 || widths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ZennError::InvalidParameter("widths must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// `D(N)` for each width, from one nested parameter draw.
pub fn sup_differences(family: Family, activation: Activation, spec: &InitSpec, widths: &[usize], grid: &[f64]) -> Result<Vec<f64>> {
    validate(widths, grid)?;
    let max_width = 2 * widths.last().unwrap();
    let neurons = spec.draw_neurons(max_width)?;
    let mut sup = vec![0.0f64; widths.len()];
    // prefix[k] = Σ_{j ≤ k} term_j(x)
    let mut prefix = vec![0.0; max_width + 1];
    for &x in grid {
        for (i, p) in neurons.iter().enumerate() {
            let j = (i + 1) as f64;
            let term = match family {
                Family::ZeNN { alpha } => j.powf(-alpha) * (p.w2 * activation.value(p.w1 * j * x + p.b1) + p.b2),
                Family::Mlp { .. } => p.w2 * activation.value(p.w1 * x + p.b1) + p.b2,
            };
            prefix[i + 1] = prefix[i] + term;
        }
        for (s, &n) in sup.iter_mut().zip(widths) {
            let d = match family {
                Family::ZeNN { .. } => prefix[2 * n] - prefix[n],
                Family::Mlp { beta } => {
                    (2.0 * n as f64).powf(-beta) * prefix[2 * n] - (n as f64).powf(-beta) * prefix[n]
                }
            };
            *s = s.max(d.abs());
        }
    }
    Ok(sup)
}

/// Convergence report averaged over `seeds`: `ln D(N)` is averaged across
/// seeds before the slope fit.
pub fn convergence_tail(
    family: Family,
    activation: Activation,
    spec: &InitSpec,
    widths: &[usize],
    grid: &[f64],
    seeds: &[u64],
) -> Result<ConvergenceReport> {
    if seeds.is_empty() {
        return Err(ZennError::Empty("at least one seed is required"));
    }
    let mut log_mean = vec![0.0; widths.len()];
    for &seed in seeds {
        let d = sup_differences(family, activation, &spec.with_seed(seed), widths, grid)?;
        for (acc, v) in log_mean.iter_mut().zip(d) {
            *acc += v.ln() / seeds.len() as f64;
        }
    }
    let log_n: Vec<f64> = widths.iter().map(|&n| (n as f64).ln()).collect();
    Ok(ConvergenceReport {
        widths: widths.to_vec(),
        sup_diff: log_mean.iter().map(|l| l.exp()).collect(),
        slope: fit_slope(&log_n, &log_mean),
    })
}

/// `count` evenly spaced points covering `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}
