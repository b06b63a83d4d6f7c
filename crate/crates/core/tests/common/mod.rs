//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use rand::Rng as _;
use zenn::stochastics::{Dist, InitSpec};
use zenn::{Activation, DeepModel, Layer, NeuronParams, ShallowMLP, ShallowZeNN};

pub const SMOOTH: [Activation; 4] = [Activation::Sine, Activation::Cosine, Activation::Sigmoid, Activation::Identity];

/// Generic laws: nonzero biases so no symmetry hides a wrong partial.
pub fn generic_spec(seed: u64) -> InitSpec {
    InitSpec {
        w1: Dist::Normal { mean: 0.0, std: 1.0 },
        b1: Dist::Normal { mean: 0.0, std: 0.7 },
        w2: Dist::Normal { mean: 0.0, std: 1.0 },
        b2: Dist::Uniform { lo: -1.0, hi: 1.0 },
        seed,
        fan_in_scaling: false,
    }
}

pub fn rng(seed: u64) -> zenn::rng::Rng {
    zenn::rng::rng(seed)
}

pub fn random_neurons(n: usize, seed: u64) -> Vec<NeuronParams> {
    generic_spec(seed).draw_neurons(n).unwrap()
}

pub fn random_zenn(n: usize, alpha: f64, act: Activation, seed: u64) -> ShallowZeNN {
    ShallowZeNN::new(alpha, act, random_neurons(n, seed)).unwrap()
}

pub fn random_mlp(n: usize, beta: f64, act: Activation, seed: u64) -> ShallowMLP {
    ShallowMLP::new(beta, act, random_neurons(n, seed)).unwrap()
}

pub fn random_vec(len: usize, scale: f64, r: &mut zenn::rng::Rng) -> Vec<f64> {
    (0..len).map(|_| scale * (2.0 * r.random::<f64>() - 1.0)).collect()
}

/// Names of the layer kinds produced by [`random_layer`].
pub const LAYER_KINDS: [&str; 9] =
    ["dense", "convmlp", "ozenn", "radzenn", "randozenn", "fourier", "fourier-trainable", "kazenn", "parallel"];

/// A randomly initialized layer of the given kind with small dimensions.
pub fn random_layer(kind: &str, act: Activation, seed: u64) -> Layer {
    let mut r = rng(seed ^ 0x5eed);
    let d = r.random_range(1..=3usize);
    let alpha = r.random_range(0.5..1.5);
    let layer = match kind {
        "dense" => Layer::dense(d, r.random_range(1..=4), 0.0, act),
        "convmlp" => Layer::dense(d, r.random_range(1..=4), alpha, act),
        "ozenn" => Layer::ozenn(d, r.random_range(1..=3), alpha, act),
        "radzenn" => Layer::radzenn(d, r.random_range(1..=4), alpha, act),
        "randozenn" => Layer::randozenn(d, 5, r.random_range(1..=6), alpha, act, seed),
        "fourier" => Layer::fourier(d, r.random_range(1..=4), 0.5, false, seed),
        "fourier-trainable" => Layer::fourier(d, r.random_range(1..=4), 0.5, true, seed),
        "kazenn" => Layer::kazenn(d, r.random_range(1..=3), r.random_range(1..=4), alpha, act),
        "parallel" => Layer::parallel(vec![
            Layer::radzenn(d, 3, alpha, Activation::Sine).unwrap(),
            Layer::dense(d, 2, alpha, act).unwrap(),
        ]),
        other => panic!("unknown kind {other}"),
    }
    .unwrap();
    let mut model = DeepModel::new(vec![layer]).unwrap();
    generic_spec(seed).init_deep(&mut model).unwrap();
    model.layers()[0].clone()
}

/// A random two- or three-layer model ending in a linear dense layer.
pub fn random_deep(first: &str, act: Activation, seed: u64) -> DeepModel {
    let head = random_layer(first, act, seed);
    let mut r = rng(seed ^ 0xdee9);
    let hidden = r.random_range(1..=4);
    let mut layers = vec![head];
    let width = layers[0].output_dim();
    layers.push(Layer::dense(width, hidden, 0.0, act).unwrap());
    layers.push(Layer::dense(hidden, r.random_range(1..=3), 0.0, Activation::Identity).unwrap());
    let mut model = DeepModel::new(layers).unwrap();
    let first_params = model.layers()[0].params();
    generic_spec(seed.wrapping_add(1)).init_deep(&mut model).unwrap();
    // Keep the first layer's own draw (and, for Fourier features, its matrix).
    model.layers_mut()[0].set_params(&first_params).unwrap();
    model
}
pub mod quadrature;
