//! Random parameter initialization.

use std::fmt;

use rand::Rng as _;

use crate::activation::Activation;
use crate::error::{Result, ZennError};
use crate::layers::{Layer, ParamRole};
use crate::model::DeepModel;
use crate::rng::{self, Rng};
use crate::shallow::{NeuronParams, ShallowMLP, ShallowZeNN};

/// Law of one parameter role.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    Normal { mean: f64, std: f64 },
    Uniform { lo: f64, hi: f64 },
    Constant(f64),
}

impl Dist {
    pub const STANDARD_NORMAL: Dist = Dist::Normal { mean: 0.0, std: 1.0 };

    pub fn validate(&self) -> Result<()> {
        match *self {
            Dist::Normal { mean, std } if !(std > 0.0 && std.is_finite() && mean.is_finite()) => {
                Err(ZennError::InvalidParameter(format!("normal std must be > 0, got {std}")))
            }
            Dist::Uniform { lo, hi } if !(lo < hi && lo.is_finite() && hi.is_finite()) => {
                Err(ZennError::InvalidParameter(format!("uniform needs lo < hi, got [{lo}, {hi}]")))
            }
            Dist::Constant(c) if !c.is_finite() => Err(ZennError::InvalidParameter("constant must be finite".into())),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn sample(&self, rng: &mut Rng) -> f64 {
        match *self {
            Dist::Normal { mean, std } => mean + std * rng.sample::<f64, _>(rand_distr::StandardNormal),
            Dist::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Dist::Constant(c) => c,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Dist::Normal { mean, .. } => mean,
            Dist::Uniform { lo, hi } => 0.5 * (lo + hi),
            Dist::Constant(c) => c,
        }
    }

    /// Whether the law is symmetric about zero.
    pub fn is_symmetric(&self) -> bool {
        self.mean() == 0.0
    }

    fn scaled(&self, factor: f64) -> Dist {
        match *self {
            Dist::Normal { mean, std } => Dist::Normal { mean: mean * factor, std: std * factor },
            Dist::Uniform { lo, hi } => Dist::Uniform { lo: lo * factor, hi: hi * factor },
            Dist::Constant(c) => Dist::Constant(c * factor),
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Normal { mean, std } => write!(f, "normal({mean}, {std})"),
            Dist::Uniform { lo, hi } => write!(f, "uniform({lo}, {hi})"),
            Dist::Constant(c) => write!(f, "constant({c})"),
        }
    }
}

/// Per-role parameter laws. Identical across neurons.
///
/// In deep layers, weights draw from `w1` and biases from `b1`; `w2`/`b2`
/// only apply to the outer parameters of shallow networks and KAZeNN edges.
/// Fourier-feature matrices are left as constructed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitSpec {
    pub w1: Dist,
    pub b1: Dist,
    pub w2: Dist,
    pub b2: Dist,
    pub seed: u64,
    /// Divide dense-layer weight laws by `sqrt(fan_in)`.
    pub fan_in_scaling: bool,
}

impl Default for InitSpec {
    fn default() -> Self {
        Self {
            w1: Dist::STANDARD_NORMAL,
            b1: Dist::Constant(0.0),
            w2: Dist::STANDARD_NORMAL,
            b2: Dist::Constant(0.0),
            seed: 0,
            fan_in_scaling: false,
        }
    }
}

impl InitSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for d in [&self.w1, &self.b1, &self.w2, &self.b2] {
            d.validate()?;
        }
        Ok(())
    }

    /// One perceptron draw, in the fixed order `w1, b1, w2, b2`.
    #[inline]
    pub fn draw_neuron(&self, rng: &mut Rng) -> NeuronParams {
        let w1 = self.w1.sample(rng);
        let b1 = self.b1.sample(rng);
        let w2 = self.w2.sample(rng);
        let b2 = self.b2.sample(rng);
        NeuronParams { w1, b1, w2, b2 }
    }

    /// `n` neurons drawn sequentially, so a wider draw extends a narrower one.
    pub fn draw_neurons(&self, n: usize) -> Result<Vec<NeuronParams>> {
        self.validate()?;
        let mut r = rng::rng(self.seed);
        Ok((0..n).map(|_| self.draw_neuron(&mut r)).collect())
    }

    pub fn shallow_zenn(&self, n: usize, alpha: f64, activation: Activation) -> Result<ShallowZeNN> {
        ShallowZeNN::new(alpha, activation, self.draw_neurons(n)?)
    }

    pub fn shallow_mlp(&self, n: usize, beta: f64, activation: Activation) -> Result<ShallowMLP> {
        ShallowMLP::new(beta, activation, self.draw_neurons(n)?)
    }

    /// Overwrites every trainable parameter of `model`.
    pub fn init_deep(&self, model: &mut DeepModel) -> Result<()> {
        self.validate()?;
        let mut r = rng::rng(self.seed);
        for layer in model.layers_mut() {
            self.init_layer(layer, &mut r)?;
        }
        Ok(())
    }

    fn init_layer(&self, layer: &mut Layer, r: &mut Rng) -> Result<()> {
        if let Layer::Parallel(p) = layer {
            let mut branches = p.branches().to_vec();
            for b in &mut branches {
                self.init_layer(b, r)?;
            }
            *layer = Layer::parallel(branches)?;
            return Ok(());
        }
        // Fourier frequencies keep their N(0, ρ²) draw even when trainable.
        if let Layer::Fourier(_) = layer {
            return Ok(());
        }
        let weight = match layer {
            Layer::Dense(_) if self.fan_in_scaling => self.w1.scaled(1.0 / (layer.input_dim() as f64).sqrt()),
            _ => self.w1,
        };
        let values: Vec<f64> = layer
            .param_roles()
            .into_iter()
            .map(|role| match role {
                ParamRole::InnerWeight => weight.sample(r),
                ParamRole::InnerBias => self.b1.sample(r),
                ParamRole::OuterWeight => self.w2.sample(r),
                ParamRole::OuterBias => self.b2.sample(r),
            })
            .collect();
        layer.set_params(&values)
    }
}

/// Samples `n` values of `dist`; used by statistical checks.
pub fn draw_many(dist: Dist, n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::rng(seed);
    (0..n).map(|_| dist.sample(&mut r)).collect()
}
