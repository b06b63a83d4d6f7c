//! Deep layer zoo.
//!
//! Every layer maps a batch `X` (`n × input_dim`, one sample per row) to a batch
//! `n × output_dim`. Trainable parameters live in flat `Vec<f64>` storage whose
//! layout is documented on each layer type; [`Layer::params`] and
//! [`Layer::set_params`] expose exactly the trainable scalars in that order.

use std::f64::consts::TAU;

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, ArrayViewMut2, Axis};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::activation::Activation;
use crate::error::{Result, ZennError};
use crate::shallow::{ShallowZeNN, PARAMS_PER_NEURON};

/// Per-layer intermediate values kept from the forward pass for backprop.
#[derive(Debug, Clone, Default)]
pub struct LayerCache {
    pub(crate) pre: Option<Array2<f64>>,
    pub(crate) children: Vec<LayerCache>,
}

/// Affine map with per-entry frequency multipliers and per-unit output decay:
///
/// ```text
/// y_k = scale_k · σ( Σ_i mult_ik · W_ik · x_i + b_k )
/// ```
///
/// Shared by dense/convMLP (`mult ≡ 1`), radZeNN (`mult_ik = k`) and randoZeNN
/// (`mult_ir = j_ir`). Parameter layout: `W` as `input_dim × units` row-major,
/// followed by `b` (`units`).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ScaledAffine {
    pub(crate) input_dim: usize,
    pub(crate) units: usize,
    pub(crate) activation: Activation,
    pub(crate) params: Vec<f64>,
    pub(crate) mult: Option<Array2<f64>>,
    pub(crate) scale: Array1<f64>,
}

impl ScaledAffine {
    fn new(input_dim: usize, units: usize, activation: Activation, mult: Option<Array2<f64>>, scale: Array1<f64>) -> Self {
        debug_assert_eq!(scale.len(), units);
        Self { input_dim, units, activation, params: vec![0.0; input_dim * units + units], mult, scale }
    }

    fn weight_len(&self) -> usize {
        self.input_dim * self.units
    }

    fn weight(&self) -> ArrayView2<'_, f64> {
        ArrayView2::from_shape((self.input_dim, self.units), &self.params[..self.weight_len()]).unwrap()
    }

    fn effective_weight(&self) -> Array2<f64> {
        match &self.mult {
            Some(m) => &self.weight() * m,
            None => self.weight().to_owned(),
        }
    }

    fn bias(&self) -> &[f64] {
        &self.params[self.weight_len()..]
    }

    fn forward(&self, x: ArrayView2<f64>) -> (Array2<f64>, LayerCache) {
        let mut pre = x.dot(&self.effective_weight());
        let bias = ArrayView2::from_shape((1, self.units), self.bias()).unwrap();
        pre += &bias;
        let mut out = pre.mapv(|u| self.activation.value(u));
        out *= &self.scale;
        (out, LayerCache { pre: Some(pre), children: Vec::new() })
    }

    fn backward(&self, x: ArrayView2<f64>, cache: &LayerCache, upstream: ArrayView2<f64>, grad: &mut [f64]) -> Array2<f64> {
        let pre = cache.pre.as_ref().expect("dense cache");
        let mut du = pre.mapv(|u| self.activation.derivative(u));
        du *= &upstream;
        du *= &self.scale;
        let (gw, gb) = grad.split_at_mut(self.weight_len());
        let mut gw = ArrayViewMut2::from_shape((self.input_dim, self.units), gw).unwrap();
        match &self.mult {
            Some(m) => {
                let raw = x.t().dot(&du);
                gw.zip_mut_with(&(raw * m), |g, v| *g += v);
            }
            None => general_mat_mul(1.0, &x.t(), &du, 1.0, &mut gw),
        }
        for (g, v) in gb.iter_mut().zip(du.sum_axis(Axis(0))) {
            *g += v;
        }
        du.dot(&self.effective_weight().t())
    }
}

fn unit_decay(units: usize, alpha: f64) -> Array1<f64> {
    Array1::from_iter((1..=units).map(|j| if alpha == 0.0 { 1.0 } else { (j as f64).powf(-alpha) }))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(ZennError::InvalidParameter(format!("decay exponent must be >= 0, got {alpha}")))
    }
}

fn check_positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(ZennError::InvalidParameter(format!("{name} must be positive")))
    } else {
        Ok(())
    }
}

/// Fully connected layer `y_j = j^(-α) σ(Σ_i W_ij x_i + b_j)`.
///
/// With `alpha = 0` this is a plain MLP layer; `alpha > 0` gives the
/// convergent-factor variant (convMLP).
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub(crate) alpha: f64,
    pub(crate) inner: ScaledAffine,
}

impl Dense {
    pub fn new(input_dim: usize, units: usize, alpha: f64, activation: Activation) -> Result<Self> {
        check_positive("input_dim", input_dim)?;
        check_positive("units", units)?;
        check_alpha(alpha)?;
        Ok(Self { alpha, inner: ScaledAffine::new(input_dim, units, activation, None, unit_decay(units, alpha)) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Full frequency-lattice layer over `Z^d_N`.
///
/// Entry `(j_1, …, j_d)` is `(Π j_i)^(-α) σ(Σ_i W_{i,j_i} j_i x_i + b_{i,j_i})`,
/// flattened row-major (last index fastest). Output dimension is `N^d`.
/// Parameter layout: `W` (`d × N`) then `b` (`d × N`).
#[derive(Debug, Clone, PartialEq)]
pub struct OZeNN {
    pub(crate) dim: usize,
    pub(crate) n: usize,
    pub(crate) alpha: f64,
    pub(crate) activation: Activation,
    pub(crate) params: Vec<f64>,
    pub(crate) scale: Vec<f64>,
}

impl OZeNN {
    pub fn new(dim: usize, n: usize, alpha: f64, activation: Activation) -> Result<Self> {
        check_positive("d", dim)?;
        check_positive("N", n)?;
        check_alpha(alpha)?;
        let outputs = n.checked_pow(dim as u32).filter(|&o| o <= 1 << 24).ok_or_else(|| {
            ZennError::InvalidParameter(format!("oZeNN output N^d = {n}^{dim} is too large"))
        })?;
        let mut scale = Vec::with_capacity(outputs);
        let mut idx = vec![1usize; dim];
        for _ in 0..outputs {
            let prod: f64 = idx.iter().map(|&j| j as f64).product();
            scale.push(if alpha == 0.0 { 1.0 } else { prod.powf(-alpha) });
            advance(&mut idx, n);
        }
        Ok(Self { dim, n, alpha, activation, params: vec![0.0; 2 * dim * n], scale })
    }

    fn outputs(&self) -> usize {
        self.scale.len()
    }

    /// `v[i*N + k] = W_{i,k+1} (k+1) x_i + b_{i,k+1}`.
    fn partials(&self, x: &[f64], v: &mut [f64]) {
        let (w, b) = self.params.split_at(self.dim * self.n);
        for i in 0..self.dim {
            for k in 0..self.n {
                let at = i * self.n + k;
                v[at] = w[at] * (k + 1) as f64 * x[i] + b[at];
            }
        }
    }

    fn forward(&self, x: ArrayView2<f64>) -> (Array2<f64>, LayerCache) {
        let rows = x.nrows();
        let mut pre = Array2::zeros((rows, self.outputs()));
        let mut out = Array2::zeros((rows, self.outputs()));
        let mut v = vec![0.0; self.dim * self.n];
        let mut idx = vec![0usize; self.dim];
        for r in 0..rows {
            let xr = x.row(r).to_vec();
            self.partials(&xr, &mut v);
            idx.iter_mut().for_each(|k| *k = 0);
            for flat in 0..self.outputs() {
                let u: f64 = idx.iter().enumerate().map(|(i, &k)| v[i * self.n + k]).sum();
                pre[[r, flat]] = u;
                out[[r, flat]] = self.scale[flat] * self.activation.value(u);
                advance0(&mut idx, self.n);
            }
        }
        (out, LayerCache { pre: Some(pre), children: Vec::new() })
    }

    fn backward(&self, x: ArrayView2<f64>, cache: &LayerCache, upstream: ArrayView2<f64>, grad: &mut [f64]) -> Array2<f64> {
        let pre = cache.pre.as_ref().expect("oZeNN cache");
        let dn = self.dim * self.n;
        let mut dx = Array2::zeros((x.nrows(), self.dim));
        let mut dv = vec![0.0; dn];
        let mut idx = vec![0usize; self.dim];
        for r in 0..x.nrows() {
            dv.iter_mut().for_each(|g| *g = 0.0);
            idx.iter_mut().for_each(|k| *k = 0);
            for flat in 0..self.outputs() {
                let du = upstream[[r, flat]] * self.scale[flat] * self.activation.derivative(pre[[r, flat]]);
                for (i, &k) in idx.iter().enumerate() {
                    dv[i * self.n + k] += du;
                }
                advance0(&mut idx, self.n);
            }
            let (gw, gb) = grad.split_at_mut(dn);
            for i in 0..self.dim {
                let xi = x[[r, i]];
                for k in 0..self.n {
                    let at = i * self.n + k;
                    let freq = (k + 1) as f64;
                    gw[at] += dv[at] * freq * xi;
                    gb[at] += dv[at];
                    dx[[r, i]] += dv[at] * self.params[at] * freq;
                }
            }
        }
        dx
    }
}

/// Odometer over `{1..n}^d`, last index fastest.
fn advance(idx: &mut [usize], n: usize) {
    for k in idx.iter_mut().rev() {
        if *k < n {
            *k += 1;
            return;
        }
        *k = 1;
    }
}

/// Zero-based odometer over `{0..n-1}^d`.
fn advance0(idx: &mut [usize], n: usize) {
    for k in idx.iter_mut().rev() {
        if *k + 1 < n {
            *k += 1;
            return;
        }
        *k = 0;
    }
}

/// Diagonal of the frequency lattice: `y_j = j^(-α) σ(Σ_i W_ij j x_i + b_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadZeNN {
    pub(crate) alpha: f64,
    pub(crate) inner: ScaledAffine,
}

impl RadZeNN {
    pub fn new(dim: usize, n: usize, alpha: f64, activation: Activation) -> Result<Self> {
        check_positive("d", dim)?;
        check_positive("N", n)?;
        check_alpha(alpha)?;
        let mult = Array2::from_shape_fn((dim, n), |(_, k)| (k + 1) as f64);
        Ok(Self { alpha, inner: ScaledAffine::new(dim, n, activation, Some(mult), unit_decay(n, alpha)) })
    }
}

/// Random subsample of the frequency lattice.
///
/// Row `r` of the `M × d` index matrix holds `(j_{1r}, …, j_{dr})` drawn i.i.d.
/// uniform from `{1..N}`; output
/// `y_r = (Π_i j_ir)^(-α) σ(Σ_i j_ir x_i W_ir + b_r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandoZeNN {
    pub(crate) n: usize,
    pub(crate) alpha: f64,
    pub(crate) indices: Vec<u32>,
    pub(crate) inner: ScaledAffine,
}

impl RandoZeNN {
    /// Samples the index matrix from `seed`.
    pub fn new(dim: usize, n: usize, m: usize, alpha: f64, activation: Activation, seed: u64) -> Result<Self> {
        check_positive("N", n)?;
        check_positive("M", m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let indices = (0..m * dim).map(|_| rng.random_range(1..=n as u32)).collect();
        Self::with_indices(dim, n, m, alpha, activation, indices)
    }

    /// Uses an explicit `M × d` row-major index matrix with entries in `1..=N`.
    pub fn with_indices(dim: usize, n: usize, m: usize, alpha: f64, activation: Activation, indices: Vec<u32>) -> Result<Self> {
        check_positive("d", dim)?;
        check_positive("N", n)?;
        check_positive("M", m)?;
        check_alpha(alpha)?;
        if indices.len() != m * dim {
            return Err(ZennError::ModelDims(format!(
                "randoZeNN index matrix has {} entries, expected {m}×{dim}",
                indices.len()
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&j| j == 0 || j as usize > n) {
            return Err(ZennError::ModelDims(format!("randoZeNN index {bad} outside 1..={n}")));
        }
        let mult = Array2::from_shape_fn((dim, m), |(i, r)| indices[r * dim + i] as f64);
        let scale = Array1::from_iter((0..m).map(|r| {
            let prod: f64 = indices[r * dim..(r + 1) * dim].iter().map(|&j| j as f64).product();
            if alpha == 0.0 { 1.0 } else { prod.powf(-alpha) }
        }));
        Ok(Self { n, alpha, indices, inner: ScaledAffine::new(dim, m, activation, Some(mult), scale) })
    }

    /// Row-major `M × d` frequency indices.
    pub fn indices(&self) -> &[u32] {
        &self.indices
    }
}

/// Fourier feature embedding `x ↦ [sin(2πBx), cos(2πBx)]` with `B` (`N × d`).
///
/// `B` is a trainable parameter only when `trainable` is set; otherwise the
/// layer has no parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierFeatures {
    pub(crate) dim: usize,
    pub(crate) n: usize,
    pub(crate) rho: f64,
    pub(crate) trainable: bool,
    pub(crate) b: Vec<f64>,
}

impl FourierFeatures {
    /// Draws `B` entries from `Normal(0, rho²)` using `seed`.
    pub fn new(dim: usize, n: usize, rho: f64, trainable: bool, seed: u64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(ZennError::InvalidParameter(format!("rho must be > 0, got {rho}")));
        }
        let normal = Normal::new(0.0, rho).expect("rho checked");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = (0..n * dim).map(|_| normal.sample(&mut rng)).collect();
        Self::with_matrix(dim, n, rho, trainable, b)
    }

    pub fn with_matrix(dim: usize, n: usize, rho: f64, trainable: bool, b: Vec<f64>) -> Result<Self> {
        check_positive("d", dim)?;
        check_positive("N", n)?;
        if b.len() != n * dim {
            return Err(ZennError::ModelDims(format!("B has {} entries, expected {n}×{dim}", b.len())));
        }
        Ok(Self { dim, n, rho, trainable, b })
    }

    pub fn matrix(&self) -> &[f64] {
        &self.b
    }

    pub fn is_trainable(&self) -> bool {
        self.trainable
    }

    fn bmat(&self) -> ArrayView2<'_, f64> {
        ArrayView2::from_shape((self.n, self.dim), &self.b).unwrap()
    }

    fn forward(&self, x: ArrayView2<f64>) -> (Array2<f64>, LayerCache) {
        let pre = x.dot(&self.bmat().t()) * TAU;
        let mut out = Array2::zeros((x.nrows(), 2 * self.n));
        out.slice_mut(s![.., ..self.n]).assign(&pre.mapv(f64::sin));
        out.slice_mut(s![.., self.n..]).assign(&pre.mapv(f64::cos));
        (out, LayerCache { pre: Some(pre), children: Vec::new() })
    }

    fn backward(&self, x: ArrayView2<f64>, cache: &LayerCache, upstream: ArrayView2<f64>, grad: &mut [f64]) -> Array2<f64> {
        let pre = cache.pre.as_ref().expect("fourier cache");
        let gs = upstream.slice(s![.., ..self.n]);
        let gc = upstream.slice(s![.., self.n..]);
        let mut du = &gs * &pre.mapv(f64::cos) - &gc * &pre.mapv(f64::sin);
        du *= TAU;
        if self.trainable {
            let mut gb = ArrayViewMut2::from_shape((self.n, self.dim), grad).unwrap();
            general_mat_mul(1.0, &du.t(), &x, 1.0, &mut gb);
        }
        du.dot(&self.bmat())
    }
}

/// One Kolmogorov–Arnold map whose edge functions are shallow scalar ZeNNs:
/// `y_q = Σ_p φ_qp(x_p)`.
///
/// Edges are stored row-major (`q` outer, `p` inner); parameters are each
/// edge's flat ZeNN parameters in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct KAZeNNEdge {
    pub(crate) input_dim: usize,
    pub(crate) output_dim: usize,
    pub(crate) edges: Vec<ShallowZeNN>,
}

impl KAZeNNEdge {
    pub fn new(input_dim: usize, output_dim: usize, n: usize, alpha: f64, activation: Activation) -> Result<Self> {
        check_positive("input_dim", input_dim)?;
        check_positive("output_dim", output_dim)?;
        let edge = ShallowZeNN::zeros(n, alpha, activation)?;
        Ok(Self { input_dim, output_dim, edges: vec![edge; input_dim * output_dim] })
    }

    pub fn from_edges(input_dim: usize, output_dim: usize, edges: Vec<ShallowZeNN>) -> Result<Self> {
        if edges.len() != input_dim * output_dim || edges.is_empty() {
            return Err(ZennError::ModelDims(format!(
                "KAZeNN grid has {} edges, expected {output_dim}×{input_dim}",
                edges.len()
            )));
        }
        Ok(Self { input_dim, output_dim, edges })
    }

    /// Edge function `φ_qp` (0-based indices).
    pub fn edge(&self, q: usize, p: usize) -> &ShallowZeNN {
        &self.edges[q * self.input_dim + p]
    }

    pub fn edges(&self) -> &[ShallowZeNN] {
        &self.edges
    }

    fn width(&self) -> usize {
        self.edges[0].width()
    }

    fn forward(&self, x: ArrayView2<f64>) -> (Array2<f64>, LayerCache) {
        let out = Array2::from_shape_fn((x.nrows(), self.output_dim), |(r, q)| {
            (0..self.input_dim).map(|p| self.edge(q, p).forward(x[[r, p]])).sum()
        });
        (out, LayerCache::default())
    }

    fn backward(&self, x: ArrayView2<f64>, upstream: ArrayView2<f64>, grad: &mut [f64]) -> Array2<f64> {
        let block = PARAMS_PER_NEURON * self.width();
        let mut dx = Array2::zeros((x.nrows(), self.input_dim));
        for r in 0..x.nrows() {
            for q in 0..self.output_dim {
                let g = upstream[[r, q]];
                for p in 0..self.input_dim {
                    let e = q * self.input_dim + p;
                    let edge = &self.edges[e];
                    let xp = x[[r, p]];
                    edge.backward_into(xp, g, &mut grad[e * block..(e + 1) * block]);
                    dx[[r, p]] += g * edge_slope(edge, xp);
                }
            }
        }
        dx
    }
}

/// `dφ/dx` for a shallow ZeNN edge.
fn edge_slope(edge: &ShallowZeNN, x: f64) -> f64 {
    edge.neurons()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let j = (i + 1) as f64;
            edge.decay(i + 1) * p.w2 * edge.activation().derivative(p.w1 * j * x + p.b1) * p.w1 * j
        })
        .sum()
}

/// Branches applied to the same input with outputs concatenated in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Parallel {
    pub(crate) branches: Vec<Layer>,
}

impl Parallel {
    pub fn new(branches: Vec<Layer>) -> Result<Self> {
        let first = branches
            .first()
            .ok_or_else(|| ZennError::InvalidParameter("parallel layer needs at least one branch".into()))?;
        let d = first.input_dim();
        if let Some(b) = branches.iter().find(|b| b.input_dim() != d) {
            return Err(ZennError::DimensionMismatch { expected: d, got: b.input_dim() });
        }
        Ok(Self { branches })
    }

    pub fn branches(&self) -> &[Layer] {
        &self.branches
    }
}

/// A single layer of a [`crate::model::DeepModel`].
#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Dense(Dense),
    OZeNN(OZeNN),
    RadZeNN(RadZeNN),
    RandoZeNN(RandoZeNN),
    Fourier(FourierFeatures),
    KAZeNN(KAZeNNEdge),
    Parallel(Parallel),
}

/// Role of a trainable scalar, used by initializers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRole {
    /// Weight multiplying the input (or frequency matrix entry).
    InnerWeight,
    InnerBias,
    /// Outer weight of a shallow ZeNN edge.
    OuterWeight,
    OuterBias,
}

impl Layer {
    pub fn dense(input_dim: usize, units: usize, alpha: f64, activation: Activation) -> Result<Self> {
        Dense::new(input_dim, units, alpha, activation).map(Layer::Dense)
    }

    pub fn ozenn(dim: usize, n: usize, alpha: f64, activation: Activation) -> Result<Self> {
        OZeNN::new(dim, n, alpha, activation).map(Layer::OZeNN)
    }

    pub fn radzenn(dim: usize, n: usize, alpha: f64, activation: Activation) -> Result<Self> {
        RadZeNN::new(dim, n, alpha, activation).map(Layer::RadZeNN)
    }

    pub fn randozenn(dim: usize, n: usize, m: usize, alpha: f64, activation: Activation, seed: u64) -> Result<Self> {
        RandoZeNN::new(dim, n, m, alpha, activation, seed).map(Layer::RandoZeNN)
    }

    pub fn fourier(dim: usize, n: usize, rho: f64, trainable: bool, seed: u64) -> Result<Self> {
        FourierFeatures::new(dim, n, rho, trainable, seed).map(Layer::Fourier)
    }

    pub fn kazenn(input_dim: usize, output_dim: usize, n: usize, alpha: f64, activation: Activation) -> Result<Self> {
        KAZeNNEdge::new(input_dim, output_dim, n, alpha, activation).map(Layer::KAZeNN)
    }

    pub fn parallel(branches: Vec<Layer>) -> Result<Self> {
        Parallel::new(branches).map(Layer::Parallel)
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Layer::Dense(l) => l.inner.input_dim,
            Layer::OZeNN(l) => l.dim,
            Layer::RadZeNN(l) => l.inner.input_dim,
            Layer::RandoZeNN(l) => l.inner.input_dim,
            Layer::Fourier(l) => l.dim,
            Layer::KAZeNN(l) => l.input_dim,
            Layer::Parallel(l) => l.branches[0].input_dim(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            Layer::Dense(l) => l.inner.units,
            Layer::OZeNN(l) => l.outputs(),
            Layer::RadZeNN(l) => l.inner.units,
            Layer::RandoZeNN(l) => l.inner.units,
            Layer::Fourier(l) => 2 * l.n,
            Layer::KAZeNN(l) => l.output_dim,
            Layer::Parallel(l) => l.branches.iter().map(Layer::output_dim).sum(),
        }
    }

    pub fn activation(&self) -> Option<Activation> {
        match self {
            Layer::Dense(l) => Some(l.inner.activation),
            Layer::OZeNN(l) => Some(l.activation),
            Layer::RadZeNN(l) => Some(l.inner.activation),
            Layer::RandoZeNN(l) => Some(l.inner.activation),
            Layer::Fourier(_) => None,
            Layer::KAZeNN(l) => Some(l.edges[0].activation()),
            Layer::Parallel(_) => None,
        }
    }

    /// Decay exponent, where the layer has one.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            Layer::Dense(l) => Some(l.alpha),
            Layer::OZeNN(l) => Some(l.alpha),
            Layer::RadZeNN(l) => Some(l.alpha),
            Layer::RandoZeNN(l) => Some(l.alpha),
            Layer::KAZeNN(l) => Some(l.edges[0].alpha()),
            Layer::Fourier(_) | Layer::Parallel(_) => None,
        }
    }

    pub fn num_params(&self) -> usize {
        match self {
            Layer::Dense(l) => l.inner.params.len(),
            Layer::OZeNN(l) => l.params.len(),
            Layer::RadZeNN(l) => l.inner.params.len(),
            Layer::RandoZeNN(l) => l.inner.params.len(),
            Layer::Fourier(l) => if l.trainable { l.b.len() } else { 0 },
            Layer::KAZeNN(l) => l.edges.len() * PARAMS_PER_NEURON * l.width(),
            Layer::Parallel(l) => l.branches.iter().map(Layer::num_params).sum(),
        }
    }

    /// Trainable parameters in storage order.
    pub fn params(&self) -> Vec<f64> {
        match self {
            Layer::Dense(l) => l.inner.params.clone(),
            Layer::OZeNN(l) => l.params.clone(),
            Layer::RadZeNN(l) => l.inner.params.clone(),
            Layer::RandoZeNN(l) => l.inner.params.clone(),
            Layer::Fourier(l) => if l.trainable { l.b.clone() } else { Vec::new() },
            Layer::KAZeNN(l) => l.edges.iter().flat_map(ShallowZeNN::params).collect(),
            Layer::Parallel(l) => l.branches.iter().flat_map(Layer::params).collect(),
        }
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        let expected = self.num_params();
        if flat.len() != expected {
            return Err(ZennError::DimensionMismatch { expected, got: flat.len() });
        }
        match self {
            Layer::Dense(l) => l.inner.params.copy_from_slice(flat),
            Layer::OZeNN(l) => l.params.copy_from_slice(flat),
            Layer::RadZeNN(l) => l.inner.params.copy_from_slice(flat),
            Layer::RandoZeNN(l) => l.inner.params.copy_from_slice(flat),
            Layer::Fourier(l) => {
                if l.trainable {
                    l.b.copy_from_slice(flat)
                }
            }
            Layer::KAZeNN(l) => {
                let block = PARAMS_PER_NEURON * l.width();
                for (e, chunk) in l.edges.iter_mut().zip(flat.chunks_exact(block)) {
                    e.set_params(chunk)?;
                }
            }
            Layer::Parallel(l) => {
                let mut at = 0;
                for b in &mut l.branches {
                    let k = b.num_params();
                    b.set_params(&flat[at..at + k])?;
                    at += k;
                }
            }
        }
        Ok(())
    }

    /// Role of each trainable scalar, aligned with [`Layer::params`].
    pub fn param_roles(&self) -> Vec<ParamRole> {
        use ParamRole::*;
        let affine = |a: &ScaledAffine| {
            let mut r = vec![InnerWeight; a.weight_len()];
            r.extend(std::iter::repeat_n(InnerBias, a.units));
            r
        };
        match self {
            Layer::Dense(l) => affine(&l.inner),
            Layer::RadZeNN(l) => affine(&l.inner),
            Layer::RandoZeNN(l) => affine(&l.inner),
            Layer::OZeNN(l) => {
                let mut r = vec![InnerWeight; l.dim * l.n];
                r.extend(std::iter::repeat_n(InnerBias, l.dim * l.n));
                r
            }
            Layer::Fourier(l) => vec![InnerWeight; if l.trainable { l.b.len() } else { 0 }],
            Layer::KAZeNN(l) => {
                let per_edge = l.width() * l.edges.len();
                [InnerWeight, InnerBias, OuterWeight, OuterBias].iter().copied().cycle().take(4 * per_edge).collect()
            }
            Layer::Parallel(l) => l.branches.iter().flat_map(Layer::param_roles).collect(),
        }
    }

    fn check_input(&self, got: usize) -> Result<()> {
        if got != self.input_dim() {
            return Err(ZennError::DimensionMismatch { expected: self.input_dim(), got });
        }
        Ok(())
    }

    /// Evaluates a single input vector.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x.len())?;
        let xb = ArrayView2::from_shape((1, x.len()), x).unwrap();
        Ok(self.forward_batch(xb)?.0.into_raw_vec_and_offset().0)
    }

    /// Returns `(∂⟨upstream, y⟩/∂θ, ∂⟨upstream, y⟩/∂x)` for a single input.
    pub fn backward(&self, x: &[f64], upstream: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_input(x.len())?;
        if upstream.len() != self.output_dim() {
            return Err(ZennError::DimensionMismatch { expected: self.output_dim(), got: upstream.len() });
        }
        let xb = ArrayView2::from_shape((1, x.len()), x).unwrap();
        let ub = ArrayView2::from_shape((1, upstream.len()), upstream).unwrap();
        let (_, cache) = self.forward_batch(xb)?;
        let mut grad = vec![0.0; self.num_params()];
        let dx = self.backward_batch(xb, &cache, ub, &mut grad)?;
        Ok((grad, dx.into_raw_vec_and_offset().0))
    }

    /// Batched forward pass (`n × input_dim` → `n × output_dim`) with backprop cache.
    pub fn forward_batch(&self, x: ArrayView2<f64>) -> Result<(Array2<f64>, LayerCache)> {
        self.check_input(x.ncols())?;
        Ok(match self {
            Layer::Dense(l) => l.inner.forward(x),
            Layer::OZeNN(l) => l.forward(x),
            Layer::RadZeNN(l) => l.inner.forward(x),
            Layer::RandoZeNN(l) => l.inner.forward(x),
            Layer::Fourier(l) => l.forward(x),
            Layer::KAZeNN(l) => l.forward(x),
            Layer::Parallel(l) => {
                let mut out = Array2::zeros((x.nrows(), self.output_dim()));
                let mut children = Vec::with_capacity(l.branches.len());
                let mut col = 0;
                for b in &l.branches {
                    let (y, c) = b.forward_batch(x)?;
                    out.slice_mut(s![.., col..col + y.ncols()]).assign(&y);
                    col += y.ncols();
                    children.push(c);
                }
                (out, LayerCache { pre: None, children })
            }
        })
    }

    /// Batched backward pass. Adds the parameter gradient summed over the batch
    /// into `grad` and returns the input gradient.
    pub fn backward_batch(
        &self,
        x: ArrayView2<f64>,
        cache: &LayerCache,
        upstream: ArrayView2<f64>,
        grad: &mut [f64],
    ) -> Result<Array2<f64>> {
        self.check_input(x.ncols())?;
        if upstream.ncols() != self.output_dim() || upstream.nrows() != x.nrows() {
            return Err(ZennError::DimensionMismatch { expected: self.output_dim(), got: upstream.ncols() });
        }
        if grad.len() != self.num_params() {
            return Err(ZennError::DimensionMismatch { expected: self.num_params(), got: grad.len() });
        }
        Ok(match self {
            Layer::Dense(l) => l.inner.backward(x, cache, upstream, grad),
            Layer::OZeNN(l) => l.backward(x, cache, upstream, grad),
            Layer::RadZeNN(l) => l.inner.backward(x, cache, upstream, grad),
            Layer::RandoZeNN(l) => l.inner.backward(x, cache, upstream, grad),
            Layer::Fourier(l) => l.backward(x, cache, upstream, grad),
            Layer::KAZeNN(l) => l.backward(x, upstream, grad),
            Layer::Parallel(l) => {
                let mut dx = Array2::zeros((x.nrows(), x.ncols()));
                let (mut col, mut at) = (0, 0);
                for (b, c) in l.branches.iter().zip(&cache.children) {
                    let (k, o) = (b.num_params(), b.output_dim());
                    let up = upstream.slice(s![.., col..col + o]);
                    dx += &b.backward_batch(x, c, up, &mut grad[at..at + k])?;
                    col += o;
                    at += k;
                }
                dx
            }
        })
    }
}
