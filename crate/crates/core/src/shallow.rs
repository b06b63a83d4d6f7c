//! Shallow scalar networks: the frequency-scaled ZeNN and the normalized MLP.
//!
//! Both map a scalar input to a scalar output through `N` perceptrons. The
//! ZeNN scales perceptron `j` (1-based) by the fixed weight `j^(-alpha)` and
//! multiplies its inner weight by `j`:
//!
//! ```text
//! f(x) = Σ_{j=1..N} j^(-α) ( w2_j σ(w1_j · j · x + b1_j) + b2_j )
//! ```
//!
//! while the MLP averages identical perceptrons with `N^(-β)`:
//!
//! ```text
//! g(x) = N^(-β) Σ_{j=1..N} ( w2_j σ(w1_j x + b1_j) + b2_j )
//! ```
//!
//! Flat parameter order for both is neuron-major: `[w1_1, b1_1, w2_1, b2_1, w1_2, ...]`.

use crate::activation::Activation;
use crate::error::{Result, ZennError};

/// Number of trainable scalars per perceptron.
pub const PARAMS_PER_NEURON: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NeuronParams {
    pub w1: f64,
    pub b1: f64,
    pub w2: f64,
    pub b2: f64,
}

impl NeuronParams {
    pub const fn new(w1: f64, b1: f64, w2: f64, b2: f64) -> Self {
        Self { w1, b1, w2, b2 }
    }

    fn is_finite(&self) -> bool {
        self.w1.is_finite() && self.b1.is_finite() && self.w2.is_finite() && self.b2.is_finite()
    }
}

fn check_neurons(neurons: &[NeuronParams]) -> Result<()> {
    if neurons.is_empty() {
        return Err(ZennError::InvalidParameter("width must be positive".into()));
    }
    if let Some(j) = neurons.iter().position(|p| !p.is_finite()) {
        return Err(ZennError::InvalidParameter(format!(
            "neuron {} has non-finite parameters",
            j + 1
        )));
    }
    Ok(())
}

fn flatten(neurons: &[NeuronParams]) -> Vec<f64> {
    neurons.iter().flat_map(|p| [p.w1, p.b1, p.w2, p.b2]).collect()
}

fn unflatten(neurons: &mut [NeuronParams], flat: &[f64]) -> Result<()> {
    if flat.len() != PARAMS_PER_NEURON * neurons.len() {
        return Err(ZennError::DimensionMismatch {
            expected: PARAMS_PER_NEURON * neurons.len(),
            got: flat.len(),
        });
    }
    for (p, c) in neurons.iter_mut().zip(flat.chunks_exact(PARAMS_PER_NEURON)) {
        *p = NeuronParams::new(c[0], c[1], c[2], c[3]);
    }
    Ok(())
}

/// Shallow Zeta neural network with `N = neurons.len()` frequency-indexed perceptrons.
#[derive(Debug, Clone, PartialEq)]
pub struct ShallowZeNN {
    alpha: f64,
    activation: Activation,
    neurons: Vec<NeuronParams>,
}

impl ShallowZeNN {
    pub fn new(alpha: f64, activation: Activation, neurons: Vec<NeuronParams>) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(ZennError::InvalidParameter(format!(
                "decay exponent alpha must be > 0, got {alpha}"
            )));
        }
        check_neurons(&neurons)?;
        Ok(Self { alpha, activation, neurons })
    }

    /// All-zero parameters.
    pub fn zeros(n: usize, alpha: f64, activation: Activation) -> Result<Self> {
        Self::new(alpha, activation, vec![NeuronParams::default(); n])
    }

    pub fn width(&self) -> usize {
        self.neurons.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn neurons(&self) -> &[NeuronParams] {
        &self.neurons
    }

    /// Neuron `j` (1-based).
    pub fn neuron(&self, j: usize) -> Result<&NeuronParams> {
        self.check_index(j)?;
        Ok(&self.neurons[j - 1])
    }

    pub fn neuron_mut(&mut self, j: usize) -> Result<&mut NeuronParams> {
        self.check_index(j)?;
        Ok(&mut self.neurons[j - 1])
    }

    pub(crate) fn check_index(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.neurons.len() {
            return Err(ZennError::IndexOutOfRange { index: j, max: self.neurons.len() });
        }
        Ok(())
    }

    /// The fixed convergence weight `j^(-alpha)`.
    #[inline]
    pub fn decay(&self, j: usize) -> f64 {
        (j as f64).powf(-self.alpha)
    }

    /// Inner argument `u_j(x) = w1_j · j · x + b1_j`.
    #[inline]
    pub fn preactivation(&self, j: usize, x: f64) -> f64 {
        let p = &self.neurons[j - 1];
        p.w1 * j as f64 * x + p.b1
    }

    pub fn forward(&self, x: f64) -> f64 {
        self.neurons
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let j = i + 1;
                let u = p.w1 * j as f64 * x + p.b1;
                self.decay(j) * (p.w2 * self.activation.value(u) + p.b2)
            })
            .sum()
    }

    /// Gradient of the output with respect to all `4N` parameters.
    pub fn backward(&self, x: f64) -> Vec<f64> {
        let mut grad = vec![0.0; PARAMS_PER_NEURON * self.width()];
        self.backward_into(x, 1.0, &mut grad);
        grad
    }

    /// Adds `upstream · ∂f(x)/∂θ` to `grad`.
    pub fn backward_into(&self, x: f64, upstream: f64, grad: &mut [f64]) {
        debug_assert_eq!(grad.len(), PARAMS_PER_NEURON * self.width());
        for (i, (p, g)) in self.neurons.iter().zip(grad.chunks_exact_mut(4)).enumerate() {
            let j = (i + 1) as f64;
            let scale = upstream * self.decay(i + 1);
            let (s, ds) = self.activation.eval(p.w1 * j * x + p.b1);
            g[0] += scale * p.w2 * ds * j * x;
            g[1] += scale * p.w2 * ds;
            g[2] += scale * s;
            g[3] += scale;
        }
    }

    pub fn params(&self) -> Vec<f64> {
        flatten(&self.neurons)
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        unflatten(&mut self.neurons, flat)
    }

    /// A copy truncated to the first `n` neurons.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        Self::new(self.alpha, self.activation, self.neurons[..n.min(self.width())].to_vec())
    }
}

/// Shallow MLP with `N^(-beta)` normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ShallowMLP {
    beta: f64,
    activation: Activation,
    neurons: Vec<NeuronParams>,
}

impl ShallowMLP {
    pub fn new(beta: f64, activation: Activation, neurons: Vec<NeuronParams>) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(ZennError::InvalidParameter(format!(
                "normalization beta must be > 0, got {beta}"
            )));
        }
        check_neurons(&neurons)?;
        Ok(Self { beta, activation, neurons })
    }

    pub fn zeros(n: usize, beta: f64, activation: Activation) -> Result<Self> {
        Self::new(beta, activation, vec![NeuronParams::default(); n])
    }

    pub fn width(&self) -> usize {
        self.neurons.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn neurons(&self) -> &[NeuronParams] {
        &self.neurons
    }

    pub fn neurons_mut(&mut self) -> &mut [NeuronParams] {
        &mut self.neurons
    }

    pub fn normalization(&self) -> f64 {
        (self.width() as f64).powf(-self.beta)
    }

    pub fn forward(&self, x: f64) -> f64 {
        let sum: f64 = self
            .neurons
            .iter()
            .map(|p| p.w2 * self.activation.value(p.w1 * x + p.b1) + p.b2)
            .sum();
        self.normalization() * sum
    }

    pub fn backward(&self, x: f64) -> Vec<f64> {
        let mut grad = vec![0.0; PARAMS_PER_NEURON * self.width()];
        self.backward_into(x, 1.0, &mut grad);
        grad
    }

    pub fn backward_into(&self, x: f64, upstream: f64, grad: &mut [f64]) {
        debug_assert_eq!(grad.len(), PARAMS_PER_NEURON * self.width());
        let scale = upstream * self.normalization();
        for (p, g) in self.neurons.iter().zip(grad.chunks_exact_mut(4)) {
            let (s, ds) = self.activation.eval(p.w1 * x + p.b1);
            g[0] += scale * p.w2 * ds * x;
            g[1] += scale * p.w2 * ds;
            g[2] += scale * s;
            g[3] += scale;
        }
    }

    pub fn params(&self) -> Vec<f64> {
        flatten(&self.neurons)
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        unflatten(&mut self.neurons, flat)
    }

    pub fn truncated(&self, n: usize) -> Result<Self> {
        Self::new(self.beta, self.activation, self.neurons[..n.min(self.width())].to_vec())
    }
}
