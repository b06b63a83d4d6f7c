//! Browser bindings for the demo page in `www/`.
//!
//! Three operations: sample a random ZeNN curve next to a matched MLP,
//! evaluate the ReLU characteristic function, and train a ZeNN on the
//! synthetic high-frequency target a few epochs at a time.

use wasm_bindgen::prelude::*;
use zenn::data::{synth1d, synth1d_target};
use zenn::stochastics::{charfn_relu_uniform, InitSpec};
use zenn::training::train_gd;
use zenn::{Activation, Dataset, ShallowZeNN, TrainConfig};

fn js_err(e: zenn::ZennError) -> JsError {
    JsError::new(&e.to_string())
}

fn parse_activation(name: &str) -> Result<Activation, JsError> {
    name.parse().map_err(js_err)
}

/// Outputs of a width-`n` ZeNN and a `1/√n` MLP drawn from the same
/// unit-normal parameters, concatenated: `[zenn(xs)..., mlp(xs)...]`.
#[wasm_bindgen]
pub fn random_curves(n: usize, alpha: f64, activation: &str, seed: u64, xs: &[f64]) -> Result<Vec<f64>, JsError> {
    let act = parse_activation(activation)?;
    let spec = InitSpec::default().with_seed(seed);
    let z = spec.shallow_zenn(n, alpha, act).map_err(js_err)?;
    let m = spec.shallow_mlp(n, 0.5, act).map_err(js_err)?;
    Ok(xs.iter().map(|&x| z.forward(x)).chain(xs.iter().map(|&x| m.forward(x))).collect())
}

/// `φ(t)` of a ReLU ZeNN with uniform inner laws at each `t`, interleaved
/// as `[re0, im0, re1, im1, ...]`.
#[wasm_bindgen]
pub fn charfn_curve(x: f64, l: f64, b: f64, alpha: f64, n: usize, ts: &[f64]) -> Result<Vec<f64>, JsError> {
    let mut out = Vec::with_capacity(2 * ts.len());
    for &t in ts {
        let phi = charfn_relu_uniform(x, t, l, b, alpha, n).map_err(js_err)?;
        out.extend([phi.re, phi.im]);
    }
    Ok(out)
}

/// The synthetic target at `xs`.
#[wasm_bindgen]
pub fn target_curve(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| synth1d_target(x)).collect()
}

/// Incremental gradient descent of a sine ZeNN on the synthetic target.
#[wasm_bindgen]
pub struct Trainer {
    model: ShallowZeNN,
    data: Dataset,
    learning_rate: f64,
    epochs: usize,
}

#[wasm_bindgen]
impl Trainer {
    #[wasm_bindgen(constructor)]
    pub fn new(width: usize, alpha: f64, points: usize, learning_rate: f64, seed: u64) -> Result<Trainer, JsError> {
        let data = synth1d(points, (0.0, 2.0), seed, 0.0).map_err(js_err)?;
        let model = InitSpec::default().with_seed(seed).shallow_zenn(width, alpha, Activation::Sine).map_err(js_err)?;
        Ok(Trainer { model, data, learning_rate, epochs: 0 })
    }

    /// Runs `epochs` more updates and returns the training MSE.
    pub fn step(&mut self, epochs: usize) -> Result<f64, JsError> {
        let config = TrainConfig { learning_rate: self.learning_rate, epochs, log_interval: epochs.max(1), ..TrainConfig::default() };
        let (model, trace) = train_gd(&self.model, &self.data, &config).map_err(js_err)?;
        self.model = model;
        self.epochs += epochs;
        Ok(trace.last().map(|r| r.train_mse).unwrap_or(f64::NAN))
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn predict(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.model.forward(x)).collect()
    }

    /// Training inputs followed by targets.
    pub fn samples(&self) -> Vec<f64> {
        self.data.inputs().iter().chain(self.data.targets().iter()).copied().collect()
    }
}
