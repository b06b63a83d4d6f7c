//! Deep models and the common regression interface used by training.

use ndarray::{Array2, ArrayView2};

use crate::activation::Activation;
use crate::error::{Result, ZennError};
use crate::layers::{Layer, LayerCache};
use crate::shallow::{ShallowMLP, ShallowZeNN};

/// Composition `Φ^(L) ∘ … ∘ Φ^(1)` of chain-compatible layers.
///
/// The flat parameter vector concatenates each layer's trainable parameters
/// in layer order.
#[derive(Debug, Clone, PartialEq)]
pub struct DeepModel {
    layers: Vec<Layer>,
}

impl DeepModel {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(ZennError::InvalidParameter("model needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(ZennError::DimensionMismatch {
                    expected: pair[0].output_dim(),
                    got: pair[1].input_dim(),
                });
            }
        }
        Ok(Self { layers })
    }

    /// A KAZeNN: `widths[0] → widths[1] → …` with one edge grid per step.
    pub fn kazenn(widths: &[usize], n: usize, alpha: f64, activation: Activation) -> Result<Self> {
        if widths.len() < 2 {
            return Err(ZennError::InvalidParameter("KAZeNN needs at least input and output widths".into()));
        }
        let layers = widths
            .windows(2)
            .map(|w| Layer::kazenn(w[0], w[1], n, alpha, activation))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().output_dim()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(Layer::num_params).sum()
    }

    pub fn params(&self) -> Vec<f64> {
        self.layers.iter().flat_map(Layer::params).collect()
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(ZennError::DimensionMismatch { expected: self.num_params(), got: flat.len() });
        }
        let mut at = 0;
        for l in &mut self.layers {
            let k = l.num_params();
            l.set_params(&flat[at..at + k])?;
            at += k;
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(ZennError::DimensionMismatch { expected: self.input_dim(), got: x.len() });
        }
        let xb = ArrayView2::from_shape((1, x.len()), x).unwrap();
        Ok(self.forward_batch(xb)?.into_raw_vec_and_offset().0)
    }

    pub fn forward_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        let mut h = x.to_owned();
        for l in &self.layers {
            h = l.forward_batch(h.view())?.0;
        }
        Ok(h)
    }

    /// Gradient of `⟨upstream, f(x)⟩` over all trainable parameters (flat order).
    pub fn backward(&self, x: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(ZennError::DimensionMismatch { expected: self.input_dim(), got: x.len() });
        }
        if upstream.len() != self.output_dim() {
            return Err(ZennError::DimensionMismatch { expected: self.output_dim(), got: upstream.len() });
        }
        let xb = ArrayView2::from_shape((1, x.len()), x).unwrap();
        let ub = ArrayView2::from_shape((1, upstream.len()), upstream).unwrap();
        self.backward_batch(xb, ub).map(|(_, g)| g)
    }

    /// Forward then backward over a batch. Returns the outputs and
    /// `Σ_rows ∂⟨upstream_row, f(x_row)⟩/∂θ`.
    pub fn backward_batch(&self, x: ArrayView2<f64>, upstream: ArrayView2<f64>) -> Result<(Array2<f64>, Vec<f64>)> {
        self.backward_with(x, |out| {
            if out.dim() != upstream.dim() {
                return Err(ZennError::DimensionMismatch { expected: out.ncols(), got: upstream.ncols() });
            }
            Ok(upstream.to_owned())
        })
    }

    fn backward_with<F>(&self, x: ArrayView2<f64>, seed: F) -> Result<(Array2<f64>, Vec<f64>)>
    where
        F: FnOnce(&Array2<f64>) -> Result<Array2<f64>>,
    {
        let mut inputs: Vec<Array2<f64>> = Vec::with_capacity(self.layers.len());
        let mut caches: Vec<LayerCache> = Vec::with_capacity(self.layers.len());
        let mut h = x.to_owned();
        for l in &self.layers {
            let (y, c) = l.forward_batch(h.view())?;
            inputs.push(h);
            caches.push(c);
            h = y;
        }
        let mut upstream = seed(&h)?;
        let mut grad = vec![0.0; self.num_params()];
        let mut end = grad.len();
        for ((l, input), cache) in self.layers.iter().zip(&inputs).zip(&caches).rev() {
            let start = end - l.num_params();
            upstream = l.backward_batch(input.view(), cache, upstream.view(), &mut grad[start..end])?;
            end = start;
        }
        Ok((h, grad))
    }
}

/// Models trainable by full-batch gradient descent on `½ Σ_μ ‖f(X_μ) − Y_μ‖²`.
pub trait Regressor: Clone {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn num_params(&self) -> usize;
    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, flat: &[f64]) -> Result<()>;
    fn predict(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>>;

    /// Loss `½ Σ (f(X) − Y)²` and its parameter gradient.
    fn loss_grad(&self, inputs: ArrayView2<f64>, targets: ArrayView2<f64>) -> Result<(f64, Vec<f64>)>;
}

fn check_batch(inputs: ArrayView2<f64>, targets: ArrayView2<f64>, din: usize, dout: usize) -> Result<()> {
    if inputs.ncols() != din {
        return Err(ZennError::DimensionMismatch { expected: din, got: inputs.ncols() });
    }
    if targets.ncols() != dout {
        return Err(ZennError::DimensionMismatch { expected: dout, got: targets.ncols() });
    }
    if inputs.nrows() != targets.nrows() {
        return Err(ZennError::DimensionMismatch { expected: inputs.nrows(), got: targets.nrows() });
    }
    Ok(())
}

macro_rules! shallow_regressor {
    ($ty:ty) => {
        impl Regressor for $ty {
            fn input_dim(&self) -> usize {
                1
            }
            fn output_dim(&self) -> usize {
                1
            }
            fn num_params(&self) -> usize {
                4 * self.width()
            }
            fn params(&self) -> Vec<f64> {
                <$ty>::params(self)
            }
            fn set_params(&mut self, flat: &[f64]) -> Result<()> {
                <$ty>::set_params(self, flat)
            }
            fn predict(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>> {
                if inputs.ncols() != 1 {
                    return Err(ZennError::DimensionMismatch { expected: 1, got: inputs.ncols() });
                }
                Ok(inputs.mapv(|x| self.forward(x)))
            }
            fn loss_grad(&self, inputs: ArrayView2<f64>, targets: ArrayView2<f64>) -> Result<(f64, Vec<f64>)> {
                check_batch(inputs, targets, 1, 1)?;
                let mut grad = vec![0.0; 4 * self.width()];
                let mut loss = 0.0;
                for (x, y) in inputs.iter().zip(targets.iter()) {
                    let e = self.forward(*x) - y;
                    loss += 0.5 * e * e;
                    self.backward_into(*x, e, &mut grad);
                }
                Ok((loss, grad))
            }
        }
    };
}

shallow_regressor!(ShallowZeNN);
shallow_regressor!(ShallowMLP);

impl Regressor for DeepModel {
    fn input_dim(&self) -> usize {
        DeepModel::input_dim(self)
    }
    fn output_dim(&self) -> usize {
        DeepModel::output_dim(self)
    }
    fn num_params(&self) -> usize {
        DeepModel::num_params(self)
    }
    fn params(&self) -> Vec<f64> {
        DeepModel::params(self)
    }
    fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        DeepModel::set_params(self, flat)
    }
    fn predict(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.forward_batch(inputs)
    }
    fn loss_grad(&self, inputs: ArrayView2<f64>, targets: ArrayView2<f64>) -> Result<(f64, Vec<f64>)> {
        check_batch(inputs, targets, self.input_dim(), self.output_dim())?;
        let mut loss = 0.0;
        let (_, grad) = self.backward_with(inputs, |out| {
            let residual = out - &targets;
            loss = 0.5 * residual.iter().map(|e| e * e).sum::<f64>();
            Ok(residual)
        })?;
        Ok((loss, grad))
    }
}
