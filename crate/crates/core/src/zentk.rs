//! The Zeta neural tangent kernel of a shallow ZeNN.
//!
//! For `f(x) = Σ_j j^(-α)(w2_j σ(u_j(x)) + b2_j)` with `u_j(x) = w1_j j x + b1_j`,
//! the kernel `K(x, y) = ⟨∇_θ f(x), ∇_θ f(y)⟩` has the closed form
//!
//! ```text
//! K(x, y) = x y Σ_j w2_j² j^(2-2α) σ'(u_j(x)) σ'(u_j(y))
//!         + Σ_j j^(-2α) [1 + σ(u_j(x)) σ(u_j(y)) + w2_j² σ'(u_j(x)) σ'(u_j(y))]
//! ```
//!
//! Under gradient flow on `½ Σ_μ (f(X_μ) − Y_μ)²` the outputs move as
//! `∂_t f(x) = −Σ_μ K(x, X_μ) E_μ`, and the loss obeys
//! `L(t) ≤ exp(−2 ∫ λ_min(τ) dτ) L(0)`.

use std::io::Write;

use ndarray::Array2;

use crate::error::{Result, ZennError};
use crate::linalg;
use crate::model::DeepModel;
use crate::shallow::ShallowZeNN;

/// Closed-form kernel value `K_θ(x, y)`.
pub fn zentk_eval(model: &ShallowZeNN, x: f64, y: f64) -> f64 {
    let act = model.activation();
    let two_alpha = 2.0 * model.alpha();
    let (mut slope_part, mut rest) = (0.0, 0.0);
    for (i, p) in model.neurons().iter().enumerate() {
        let j = (i + 1) as f64;
        let (sx, dx) = act.eval(p.w1 * j * x + p.b1);
        let (sy, dy) = act.eval(p.w1 * j * y + p.b1);
        // Pair the two points first so that K(x, y) == K(y, x) bitwise.
        let (ss, dd) = (sx * sy, dx * dy);
        let w2sq = p.w2 * p.w2;
        slope_part += w2sq * j.powf(2.0 - two_alpha) * dd;
        rest += j.powf(-two_alpha) * (1.0 + ss + w2sq * dd);
    }
    x * y * slope_part + rest
}

/// `∂²K(x, y) / ∂(w2_j)² = 2 j^(2-2α) (xy + 1/j²) σ'(u_j(x)) σ'(u_j(y))`, `j` 1-based.
///
/// `K` is quadratic in `w2_j`, hence the factor 2. The value does not depend
/// on the width and is nonzero wherever `σ'` is nonzero at both points.
pub fn feature_probe(model: &ShallowZeNN, j: usize, x: f64, y: f64) -> Result<f64> {
    model.check_index(j)?;
    let act = model.activation();
    let jf = j as f64;
    let dx = act.derivative(model.preactivation(j, x));
    let dy = act.derivative(model.preactivation(j, y));
    Ok(2.0 * jf.powf(2.0 - 2.0 * model.alpha()) * (x * y + 1.0 / (jf * jf)) * (dx * dy))
}

/// Symmetric kernel Gram matrix over a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub entries: Array2<f64>,
    pub points: Vec<f64>,
}

impl KernelMatrix {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::symmetric_eigen(&self.entries)?.values.to_vec())
    }

    pub fn smallest_eigenvalue(&self) -> Result<f64> {
        linalg::smallest_eigenvalue(&self.entries)
    }

    /// Row-major CSV: header `x,<p1>,<p2>,…`, then one row per point.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x".to_string()];
        header.extend(self.points.iter().map(|p| format!("{p}")));
        w.write_record(&header)?;
        for (p, row) in self.points.iter().zip(self.entries.rows()) {
            let mut rec = vec![format!("{p}")];
            rec.extend(row.iter().map(|v| format!("{v:e}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Pairwise kernel values; the upper triangle is computed once and mirrored.
pub fn zentk_gram(model: &ShallowZeNN, points: &[f64]) -> Result<KernelMatrix> {
    gram_with(points, |x, y| zentk_eval(model, x, y))
}

fn gram_with<F: Fn(f64, f64) -> f64>(points: &[f64], k: F) -> Result<KernelMatrix> {
    if points.is_empty() {
        return Err(ZennError::Empty("kernel points"));
    }
    let n = points.len();
    let mut entries = Array2::zeros((n, n));
    for a in 0..n {
        for b in a..n {
            let v = k(points[a], points[b]);
            entries[[a, b]] = v;
            entries[[b, a]] = v;
        }
    }
    Ok(KernelMatrix { entries, points: points.to_vec() })
}

/// Empirical tangent kernel of a deep model: `K_kl = ⟨∇θ f_k(x), ∇θ f_l(y)⟩`
/// for output components `k, l`.
pub fn empirical_kernel(model: &DeepModel, x: &[f64], y: &[f64]) -> Result<Array2<f64>> {
    let d = model.output_dim();
    let jac = |z: &[f64]| -> Result<Vec<Vec<f64>>> {
        (0..d)
            .map(|k| {
                let mut e = vec![0.0; d];
                e[k] = 1.0;
                model.backward(z, &e)
            })
            .collect()
    };
    let (gx, gy) = (jac(x)?, jac(y)?);
    Ok(Array2::from_shape_fn((d, d), |(k, l)| gx[k].iter().zip(&gy[l]).map(|(a, b)| a * b).sum()))
}

/// One logged point of a training run: step index, loss and `λ_min` of the
/// training Gram matrix at that step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSample {
    pub step: usize,
    pub loss: f64,
    pub lambda_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallStep {
    pub step: usize,
    pub time: f64,
    pub loss: f64,
    pub bound: f64,
    /// `bound - loss`; negative where the discrete run exceeds the flow bound.
    pub margin: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GronwallReport {
    pub steps: Vec<GronwallStep>,
}

impl GronwallReport {
    pub fn violations(&self) -> usize {
        self.steps.iter().filter(|s| s.violated).count()
    }
}

/// Compares a discrete trajectory against the gradient-flow bound
/// `L(0) exp(−2 ∫ λ_min)`, with step `k` at time `k·η` and the integral taken
/// by the trapezoidal rule over the logged samples.
///
/// The bound holds for continuous flow only, so violations are reported, not
/// treated as errors.
pub fn gronwall_diagnostic(trace: &[SpectralSample], learning_rate: f64) -> Result<GronwallReport> {
    let first = trace.first().ok_or(ZennError::Empty("spectral trace"))?;
    if trace.windows(2).any(|w| w[1].step <= w[0].step) {
        return Err(ZennError::InvalidParameter("trace steps must be strictly increasing".into()));
    }
    let l0 = first.loss;
    let t0 = first.step as f64 * learning_rate;
    let mut integral = 0.0;
    let mut steps = Vec::with_capacity(trace.len());
    for (i, s) in trace.iter().enumerate() {
        let time = s.step as f64 * learning_rate;
        if i > 0 {
            let prev = &trace[i - 1];
            integral += 0.5 * (s.lambda_min + prev.lambda_min) * (time - prev.step as f64 * learning_rate);
        }
        let bound = (-2.0 * integral).exp() * l0;
        steps.push(GronwallStep {
            step: s.step,
            time: time - t0,
            loss: s.loss,
            bound,
            margin: bound - s.loss,
            violated: s.loss > bound * (1.0 + 1e-12),
        });
    }
    Ok(GronwallReport { steps })
}
