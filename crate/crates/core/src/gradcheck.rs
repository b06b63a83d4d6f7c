//! Central finite-difference checks of the analytic gradients.
//!
//! Relative error is `|a − n| / max(|a|, |n|, floor)`. The floor keeps
//! partials that are zero up to rounding from dominating the statistic:
//! a central difference with step `h` carries an absolute rounding error
//! of about `ε·|f| / h`, which no relative bound can absorb when the true
//! partial vanishes.

use crate::error::{Result, ZennError};
use crate::layers::Layer;
use crate::model::{DeepModel, Regressor};
use crate::shallow::{ShallowMLP, ShallowZeNN};

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Default denominator floor.
pub const REL_FLOOR: f64 = 1e-4;

pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Central differences of `f` at `theta`.
pub fn numeric_gradient<F: FnMut(&[f64]) -> f64>(mut f: F, theta: &[f64], h: f64) -> Vec<f64> {
    let mut probe = theta.to_vec();
    (0..theta.len())
        .map(|i| {
            probe[i] = theta[i] + h;
            let up = f(&probe);
            probe[i] = theta[i] - h;
            let down = f(&probe);
            probe[i] = theta[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Outcome of comparing an analytic gradient with finite differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub max_rel_error: f64,
    /// Index of the worst component, if any were compared.
    pub worst: Option<usize>,
    pub checked: usize,
}

impl GradCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_error < tol
    }

    /// Combines two checks, keeping the worse one's error.
    pub fn merge(self, other: GradCheck) -> GradCheck {
        let (worse, offset) = if other.max_rel_error > self.max_rel_error { (other, self.checked) } else { (self, 0) };
        GradCheck {
            max_rel_error: worse.max_rel_error,
            worst: worse.worst.map(|w| w + offset),
            checked: self.checked + other.checked,
        }
    }
}

pub fn compare(analytic: &[f64], numeric: &[f64], floor: f64) -> Result<GradCheck> {
    if analytic.len() != numeric.len() {
        return Err(ZennError::DimensionMismatch { expected: numeric.len(), got: analytic.len() });
    }
    let mut out = GradCheck { max_rel_error: 0.0, worst: None, checked: analytic.len() };
    for (i, (a, n)) in analytic.iter().zip(numeric).enumerate() {
        let e = relative_error(*a, *n, floor);
        if out.worst.is_none() || e > out.max_rel_error || e.is_nan() {
            out.max_rel_error = if e.is_nan() { f64::INFINITY } else { e };
            out.worst = Some(i);
        }
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks the parameter gradient of a shallow ZeNN output at `x`.
pub fn check_shallow_zenn(model: &ShallowZeNN, x: f64) -> Result<GradCheck> {
    let theta = model.params();
    let mut probe = model.clone();
    let numeric = numeric_gradient(
        |p| {
            probe.set_params(p).expect("same length");
            probe.forward(x)
        },
        &theta,
        FD_STEP,
    );
    compare(&model.backward(x), &numeric, REL_FLOOR)
}

/// Checks the parameter gradient of a shallow MLP output at `x`.
pub fn check_shallow_mlp(model: &ShallowMLP, x: f64) -> Result<GradCheck> {
    let theta = model.params();
    let mut probe = model.clone();
    let numeric = numeric_gradient(
        |p| {
            probe.set_params(p).expect("same length");
            probe.forward(x)
        },
        &theta,
        FD_STEP,
    );
    compare(&model.backward(x), &numeric, REL_FLOOR)
}

/// Checks both the parameter and the input gradient of
/// `⟨upstream, layer(x)⟩`. Returns `(params, inputs)`.
pub fn check_layer(layer: &Layer, x: &[f64], upstream: &[f64]) -> Result<(GradCheck, GradCheck)> {
    let (pg, ig) = layer.backward(x, upstream)?;
    let theta = layer.params();
    let mut probe = layer.clone();
    let numeric_p = numeric_gradient(
        |p| {
            probe.set_params(p).expect("same length");
            dot(upstream, &probe.forward(x).expect("valid input"))
        },
        &theta,
        FD_STEP,
    );
    let numeric_x = numeric_gradient(|z| dot(upstream, &layer.forward(z).expect("valid input")), x, FD_STEP);
    Ok((compare(&pg, &numeric_p, REL_FLOOR)?, compare(&ig, &numeric_x, REL_FLOOR)?))
}

/// Checks the flat parameter gradient of `⟨upstream, model(x)⟩`.
pub fn check_model(model: &DeepModel, x: &[f64], upstream: &[f64]) -> Result<GradCheck> {
    let g = model.backward(x, upstream)?;
    let theta = model.params();
    let mut probe = model.clone();
    let numeric = numeric_gradient(
        |p| {
            probe.set_params(p).expect("same length");
            dot(upstream, &probe.forward(x).expect("valid input"))
        },
        &theta,
        FD_STEP,
    );
    compare(&g, &numeric, REL_FLOOR)
}

/// Checks the batched loss gradient of any [`Regressor`].
pub fn check_loss<M: Regressor>(
    model: &M,
    inputs: ndarray::ArrayView2<f64>,
    targets: ndarray::ArrayView2<f64>,
) -> Result<GradCheck> {
    let (_, g) = model.loss_grad(inputs, targets)?;
    let theta = model.params();
    let mut probe = model.clone();
    let numeric = numeric_gradient(
        |p| {
            probe.set_params(p).expect("same length");
            probe.loss_grad(inputs, targets).expect("valid batch").0
        },
        &theta,
        FD_STEP,
    );
    compare(&g, &numeric, REL_FLOOR)
}
