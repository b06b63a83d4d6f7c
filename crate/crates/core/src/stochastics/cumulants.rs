//! Cumulants of random perceptrons, ZeNNs and MLPs at a fixed input.
//!
//! For independent perceptrons `p_j`, cumulants add, so the `r`-th cumulant of
//! a width-`N` ZeNN at `x` is `Σ_{j=1..N} λ^(r)(jx) / j^(rα)` where `λ^(r)` is
//! the cumulant of a single perceptron `w2 σ(w1 x + b1) + b2`. The MLP
//! counterpart with `N^(-1/2)` normalization has `λ^(r)(x) / N^(r/2 - 1)`.

use crate::activation::Activation;
use crate::error::{Result, ZennError};
use crate::rng;
use crate::stochastics::init::InitSpec;
use crate::stochastics::kstat::{excess_kurtosis, k_statistics, Estimate, KStatistics};

/// Smallest Monte-Carlo sample the estimators accept.
pub const MIN_SAMPLES: usize = 10_000;

/// Per-term tolerance for infinite-width series.
pub const SERIES_TOLERANCE: f64 = 1e-12;

/// Hard cap on the number of terms summed for an infinite series.
pub const MAX_SERIES_TERMS: usize = 50_000_000;

/// Finite width or the `N = ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Width {
    Finite(usize),
    Infinite,
}

/// Analytic and Monte-Carlo cumulant of order `r` at one width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantReport {
    pub order: usize,
    pub width: usize,
    pub alpha: f64,
    pub x: f64,
    pub analytic: f64,
    /// Standard error carried by the analytic value when its per-perceptron
    /// cumulants were themselves estimated; zero for exact inputs.
    pub analytic_stderr: f64,
    pub mc: Estimate,
    pub samples: usize,
}

impl CumulantReport {
    pub fn combined_stderr(&self) -> f64 {
        self.analytic_stderr.hypot(self.mc.stderr)
    }

    pub fn z_score(&self) -> f64 {
        (self.analytic - self.mc.value).abs() / self.combined_stderr()
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(ZennError::InvalidParameter(format!(
            "Monte-Carlo needs at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    Ok(())
}

/// Draws `samples` outputs of `eval` over independent parameter sequences.
///
/// Sample `s` uses ChaCha8 stream `s / CHUNK` of the `InitSpec` seed, so each
/// chunk is reproducible on its own.
fn sample_outputs<F>(spec: &InitSpec, samples: usize, mut eval: F) -> Vec<f64>
where
    F: FnMut(&mut rng::Rng) -> f64,
{
    const CHUNK: usize = 1 << 16;
    let mut out = Vec::with_capacity(samples);
    let mut chunk = 0u64;
    while out.len() < samples {
        let mut r = rng::stream(spec.seed, chunk);
        let take = CHUNK.min(samples - out.len());
        for _ in 0..take {
            out.push(eval(&mut r));
        }
        chunk += 1;
    }
    out
}

/// Samples of a single perceptron `w2 σ(w1 x + b1) + b2`.
pub fn perceptron_samples(spec: &InitSpec, activation: Activation, x: f64, samples: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    Ok(sample_outputs(spec, samples, |r| {
        let p = spec.draw_neuron(r);
        p.w2 * activation.value(p.w1 * x + p.b1) + p.b2
    }))
}

/// Samples of a width-`n` ZeNN output at `x`.
pub fn zenn_samples(spec: &InitSpec, activation: Activation, alpha: f64, n: usize, x: f64, samples: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let decay: Vec<f64> = (1..=n).map(|j| (j as f64).powf(-alpha)).collect();
    Ok(sample_outputs(spec, samples, |r| {
        decay
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let p = spec.draw_neuron(r);
                d * (p.w2 * activation.value(p.w1 * (i + 1) as f64 * x + p.b1) + p.b2)
            })
            .sum()
    }))
}

/// Samples of a width-`n` MLP output at `x` with `N^(-beta)` normalization.
pub fn mlp_samples(spec: &InitSpec, activation: Activation, beta: f64, n: usize, x: f64, samples: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let norm = (n as f64).powf(-beta);
    Ok(sample_outputs(spec, samples, |r| {
        let s: f64 = (0..n)
            .map(|_| {
                let p = spec.draw_neuron(r);
                p.w2 * activation.value(p.w1 * x + p.b1) + p.b2
            })
            .sum();
        norm * s
    }))
}

/// Monte-Carlo k-statistics of a single perceptron at `x`, orders `1..=max_order`.
pub fn perceptron_cumulants_mc(spec: &InitSpec, activation: Activation, x: f64, max_order: usize, samples: usize) -> Result<KStatistics> {
    check_samples(samples)?;
    k_statistics(&perceptron_samples(spec, activation, x, samples)?, max_order)
}

/// Monte-Carlo estimate of the `r`-th cumulant of a single perceptron at `x`.
pub fn perceptron_cumulant_mc(spec: &InitSpec, activation: Activation, x: f64, r: usize, samples: usize) -> Result<Estimate> {
    Ok(perceptron_cumulants_mc(spec, activation, x, r, samples)?.order(r))
}

/// Monte-Carlo k-statistics of a width-`n` ZeNN at `x`.
pub fn zenn_cumulants_mc(
    spec: &InitSpec,
    activation: Activation,
    alpha: f64,
    n: usize,
    x: f64,
    max_order: usize,
    samples: usize,
) -> Result<KStatistics> {
    check_samples(samples)?;
    k_statistics(&zenn_samples(spec, activation, alpha, n, x, samples)?, max_order)
}

/// Monte-Carlo excess kurtosis of a width-`n` ZeNN at `x`.
pub fn zenn_excess_kurtosis_mc(spec: &InitSpec, activation: Activation, alpha: f64, n: usize, x: f64, samples: usize) -> Result<Estimate> {
    check_samples(samples)?;
    excess_kurtosis(&zenn_samples(spec, activation, alpha, n, x, samples)?)
}

/// Monte-Carlo excess kurtosis of a width-`n` MLP at `x`.
pub fn mlp_excess_kurtosis_mc(spec: &InitSpec, activation: Activation, beta: f64, n: usize, x: f64, samples: usize) -> Result<Estimate> {
    check_samples(samples)?;
    excess_kurtosis(&mlp_samples(spec, activation, beta, n, x, samples)?)
}

/// Partial sum `Σ_{j=1..N} λ(jx) / j^(rα)`.
///
/// For [`Width::Infinite`], terms are added until the growth bound
/// `(1 + |jx|)^(rk) / j^(rα)` of the next term drops below
/// [`SERIES_TOLERANCE`], where `k` is the polynomial growth order of the
/// activation (`0` for bounded activations).
pub fn zenn_cumulant_series<F>(lambda: F, r: usize, alpha: f64, x: f64, width: Width, growth_order: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if r == 0 {
        return Err(ZennError::InvalidParameter("cumulant order must be positive".into()));
    }
    let ra = r as f64 * alpha;
    match width {
        Width::Finite(n) => Ok((1..=n).map(|j| lambda(j as f64 * x) * (j as f64).powf(-ra)).sum()),
        Width::Infinite => {
            if ra <= 1.0 {
                return Err(ZennError::InvalidParameter(format!(
                    "infinite-width cumulant series diverges: r·alpha = {ra} <= 1"
                )));
            }
            let rk = (r as u32 * growth_order) as f64;
            if ra - rk <= 1.0 {
                return Err(ZennError::InvalidParameter(format!(
                    "infinite-width series needs r·(alpha - k) > 1, got {}",
                    ra - rk
                )));
            }
            let mut sum = 0.0;
            for j in 1..=MAX_SERIES_TERMS {
                let jf = j as f64;
                sum += lambda(jf * x) * jf.powf(-ra);
                let next = jf + 1.0;
                if (1.0 + (next * x).abs()).powf(rk) * next.powf(-ra) < SERIES_TOLERANCE {
                    return Ok(sum);
                }
            }
            Err(ZennError::InvalidParameter(format!(
                "series did not reach tolerance {SERIES_TOLERANCE:e} within {MAX_SERIES_TERMS} terms"
            )))
        }
    }
}

/// Cumulant of a zero-mean width-`N` MLP with `1/√N` normalization:
/// `λ^(r) / N^(r/2 - 1)`.
pub fn mlp_cumulant_scaling(lambda: f64, r: usize, n: usize) -> f64 {
    lambda / (n as f64).powf(r as f64 / 2.0 - 1.0)
}

/// Analytic partial sums checked against width-`n` Monte-Carlo.
///
/// The per-perceptron cumulants `λ^(r)(jx)` are themselves Monte-Carlo
/// estimates (one independent run per `j`), and their standard errors
/// propagate into `analytic_stderr`.
pub fn cumulant_additivity(
    spec: &InitSpec,
    activation: Activation,
    alpha: f64,
    n: usize,
    x: f64,
    max_order: usize,
    samples: usize,
) -> Result<Vec<CumulantReport>> {
    let per_j = (1..=n)
        .map(|j| {
            let s = InitSpec { seed: rng::sub_seed(spec.seed, &format!("perceptron-{j}")), ..*spec };
            perceptron_cumulants_mc(&s, activation, j as f64 * x, max_order, samples)
        })
        .collect::<Result<Vec<_>>>()?;
    let zenn_spec = InitSpec { seed: rng::sub_seed(spec.seed, "zenn"), ..*spec };
    let mc = zenn_cumulants_mc(&zenn_spec, activation, alpha, n, x, max_order, samples)?;
    Ok((1..=max_order)
        .map(|r| {
            let ra = r as f64 * alpha;
            let (mut analytic, mut var) = (0.0, 0.0);
            for (i, k) in per_j.iter().enumerate() {
                let w = ((i + 1) as f64).powf(-ra);
                analytic += w * k.order(r).value;
                var += (w * k.order(r).stderr).powi(2);
            }
            CumulantReport {
                order: r,
                width: n,
                alpha,
                x,
                analytic,
                analytic_stderr: var.sqrt(),
                mc: mc.order(r),
                samples,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastics::init::Dist;

    fn uniform_bias_spec(seed: u64) -> InitSpec {
        InitSpec {
            w1: Dist::STANDARD_NORMAL,
            b1: Dist::Constant(0.0),
            w2: Dist::Constant(0.0),
            b2: Dist::Uniform { lo: -1.0, hi: 1.0 },
            seed,
            fan_in_scaling: false,
        }
    }

    #[test]
    fn series_at_zero_matches_zeta_partial_sum() {
        let s = zenn_cumulant_series(|_| 1.0, 2, 1.0, 0.0, Width::Finite(3), 0).unwrap();
        assert!((s - 49.0 / 36.0).abs() < 1e-15);
        assert_eq!(zenn_cumulant_series(|_| 0.0, 3, 1.0, 0.4, Width::Finite(10), 0).unwrap(), 0.0);
    }

    #[test]
    fn infinite_series() {
        let s = zenn_cumulant_series(|_| 1.0, 2, 1.0, 0.0, Width::Infinite, 0).unwrap();
        assert!((s - std::f64::consts::PI.powi(2) / 6.0).abs() < 2e-6);
        let s4 = zenn_cumulant_series(|_| 1.0, 4, 1.0, 0.0, Width::Infinite, 0).unwrap();
        // per-term cutoff at j = 1000 leaves a tail of about 1/(3·1000³)
        assert!((s4 - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-9);
        assert!(zenn_cumulant_series(|_| 1.0, 1, 1.0, 0.0, Width::Infinite, 0).is_err());
        assert!(zenn_cumulant_series(|_| 1.0, 2, 0.4, 0.0, Width::Infinite, 0).is_err());
    }

    #[test]
    fn mlp_scaling() {
        assert_eq!(mlp_cumulant_scaling(0.7, 2, 1000), 0.7);
        assert_eq!(mlp_cumulant_scaling(2.0, 4, 4), 0.5);
    }

    #[test]
    fn uniform_bias_perceptron_cumulants() {
        let k = perceptron_cumulants_mc(&uniform_bias_spec(1), Activation::Sine, 0.3, 4, 400_000).unwrap();
        assert!(k.order(2).within(1.0 / 3.0, 3.0), "{:?}", k.order(2));
        assert!(k.order(3).within(0.0, 3.0), "{:?}", k.order(3));
        assert!(k.order(4).within(-2.0 / 15.0, 3.0), "{:?}", k.order(4));
    }

    #[test]
    fn too_few_samples() {
        assert!(perceptron_cumulant_mc(&InitSpec::default(), Activation::Sine, 0.0, 2, 100).is_err());
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let a = zenn_samples(&InitSpec::default().with_seed(3), Activation::Sine, 1.5, 4, 0.7, 1000).unwrap();
        let b = zenn_samples(&InitSpec::default().with_seed(3), Activation::Sine, 1.5, 4, 0.7, 1000).unwrap();
        assert_eq!(a, b);
    }
}
