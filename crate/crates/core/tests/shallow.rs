mod common;

use common::*;
use zenn::gradcheck::{check_loss, check_shallow_mlp, check_shallow_zenn};
use zenn::{Activation, NeuronParams, ShallowMLP, ShallowZeNN};

/// Parameters of the extended-precision oracle in `tools/oracles/shallow_forward.py`.
fn oracle_neurons() -> Vec<NeuronParams> {
    vec![
        NeuronParams::new(0.83, -0.41, 1.27, 0.35),
        NeuronParams::new(-1.12, 0.66, -0.58, -0.9),
        NeuronParams::new(0.47, 0.12, 2.05, 0.18),
    ]
}

#[test]
fn zenn_forward_matches_extended_precision_oracle() {
    let cases = [
        (Activation::Sine, 0.96085868966679069999, -0.83546059403448450665),
        (Activation::Sigmoid, 1.0554257277884478262, -0.14631957852050215907),
        (Activation::Cosine, 1.3427585718760401799, -1.7333451459790674347),
    ];
    for (act, at_07, at_m23) in cases {
        let m = ShallowZeNN::new(1.1, act, oracle_neurons()).unwrap();
        assert!((m.forward(0.7) - at_07).abs() < 1e-12, "{act}");
        assert!((m.forward(-2.3) - at_m23).abs() < 1e-12, "{act}");
    }
}

#[test]
fn mlp_forward_matches_extended_precision_oracle() {
    let cases = [
        (Activation::Sine, 0.46631541193426659289, -1.6896969933372677669),
        (Activation::Sigmoid, 0.74965500412439631602, -0.14267687186591284181),
        (Activation::Cosine, 1.2428837552837390407, 0.29874566000720188698),
    ];
    for (act, at_07, at_m23) in cases {
        let m = ShallowMLP::new(0.5, act, oracle_neurons()).unwrap();
        assert!((m.forward(0.7) - at_07).abs() < 1e-12, "{act}");
        assert!((m.forward(-2.3) - at_m23).abs() < 1e-12, "{act}");
    }
}

#[test]
fn shallow_gradients_match_finite_differences() {
    for seed in 0..100u64 {
        let act = SMOOTH[seed as usize % SMOOTH.len()];
        let n = 1 + seed as usize % 12;
        let mut r = rng(seed);
        let x = random_vec(1, 2.0, &mut r)[0];
        let z = random_zenn(n, 0.5 + (seed % 4) as f64 * 0.4, act, seed);
        let m = random_mlp(n, 0.5, act, seed);
        let cz = check_shallow_zenn(&z, x).unwrap();
        let cm = check_shallow_mlp(&m, x).unwrap();
        assert!(cz.passes(1e-6), "zenn seed {seed}: {cz:?}");
        assert!(cm.passes(1e-6), "mlp seed {seed}: {cm:?}");
    }
}

#[test]
fn loss_gradients_match_finite_differences() {
    let xs = ndarray::array![[0.1], [0.6], [1.3], [-0.4]];
    let ys = ndarray::array![[0.5], [-0.2], [1.0], [0.0]];
    for seed in 0..10u64 {
        let z = random_zenn(8, 1.1, Activation::Sine, seed);
        let m = random_mlp(8, 0.5, Activation::Sine, seed);
        assert!(check_loss(&z, xs.view(), ys.view()).unwrap().passes(1e-6));
        assert!(check_loss(&m, xs.view(), ys.view()).unwrap().passes(1e-6));
        let deep = random_deep("radzenn", Activation::Sine, seed);
        let xd = ndarray::Array2::from_shape_fn((3, deep.input_dim()), |(i, k)| 0.3 * i as f64 - 0.2 * k as f64);
        let yd = ndarray::Array2::from_shape_fn((3, deep.output_dim()), |(i, k)| (i + k) as f64 * 0.1);
        assert!(check_loss(&deep, xd.view(), yd.view()).unwrap().passes(1e-6));
    }
}

#[test]
fn swapping_neurons_breaks_zenn_but_not_mlp() {
    for seed in 0..20u64 {
        let neurons = random_neurons(6, seed);
        let mut swapped = neurons.clone();
        swapped.swap(1, 4);
        let z = ShallowZeNN::new(1.1, Activation::Sine, neurons.clone()).unwrap();
        let zs = ShallowZeNN::new(1.1, Activation::Sine, swapped.clone()).unwrap();
        assert_ne!(z.forward(0.8), zs.forward(0.8), "seed {seed}");
        let m = ShallowMLP::new(0.5, Activation::Sine, neurons).unwrap();
        let ms = ShallowMLP::new(0.5, Activation::Sine, swapped).unwrap();
        assert!((m.forward(0.8) - ms.forward(0.8)).abs() < 1e-15, "seed {seed}");
    }
}
