mod common;

use common::*;
use ndarray::Array2;
use zenn::linalg::asymmetry;
use zenn::zentk::{empirical_kernel, feature_probe, gronwall_diagnostic, zentk_eval, zentk_gram, SpectralSample};
use zenn::{Activation, DeepModel, Layer, Regressor};

fn jacobian_inner(m: &zenn::ShallowZeNN, x: f64, y: f64) -> f64 {
    m.backward(x).iter().zip(m.backward(y)).map(|(a, b)| a * b).sum()
}

#[test]
fn kernel_is_the_jacobian_inner_product() {
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let act = SMOOTH[seed as usize % SMOOTH.len()];
        let mut r = rng(seed);
        let n = 1 + (seed as usize * 7) % 40;
        let m = random_zenn(n, 0.6 + (seed % 5) as f64 * 0.3, act, seed);
        let xy = random_vec(2, 2.0, &mut r);
        let k = zentk_eval(&m, xy[0], xy[1]);
        let j = jacobian_inner(&m, xy[0], xy[1]);
        let rel = (k - j).abs() / k.abs().max(j.abs());
        worst = worst.max(rel);
        assert!(rel < 1e-12, "seed {seed}: {k} vs {j}");
        assert_eq!(k, zentk_eval(&m, xy[1], xy[0]));
    }
    eprintln!("worst kernel identity error {worst:.2e}");
}

#[test]
fn gram_matrices_are_symmetric_and_psd() {
    for seed in 0..100u64 {
        let act = [Activation::Sine, Activation::Cosine, Activation::Sigmoid, Activation::ReLU][seed as usize % 4];
        let m = random_zenn(3 + seed as usize % 30, 1.1, act, seed);
        let mut r = rng(seed + 1000);
        let pts = random_vec(2 + seed as usize % 12, 2.0, &mut r);
        let k = zentk_gram(&m, &pts).unwrap();
        assert_eq!(asymmetry(&k.entries), 0.0);
        let lmin = k.smallest_eigenvalue().unwrap();
        assert!(lmin >= -1e-9, "seed {seed}: λ_min {lmin}");
    }
}

#[test]
fn gram_entries_match_pointwise_evaluation() {
    let m = random_zenn(17, 1.3, Activation::Sine, 4);
    let pts = [-0.4, 0.0, 0.25, 1.7];
    let k = zentk_gram(&m, &pts).unwrap();
    for (a, &x) in pts.iter().enumerate() {
        for (b, &y) in pts.iter().enumerate() {
            assert_eq!(k.entries[[a, b]], zentk_eval(&m, x, y));
        }
    }
    let mut csv = Vec::new();
    k.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("x,-0.4,0,0.25,1.7\n"));
    assert_eq!(text.lines().count(), 5);
}

/// `∂²K/∂(w2_j)²` by a second central difference in `w2_j`.
fn probe_by_differences(m: &zenn::ShallowZeNN, j: usize, x: f64, y: f64, h: f64) -> f64 {
    let at = |delta: f64| {
        let mut p = m.clone();
        p.neuron_mut(j).unwrap().w2 += delta;
        zentk_eval(&p, x, y)
    };
    (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h)
}

#[test]
fn feature_probe_matches_second_differences() {
    for (k, &n) in [4usize, 64, 1024].iter().enumerate() {
        for j in [1usize, 2, 3] {
            let m = random_zenn(n, 1.1, Activation::Sine, 10 * k as u64 + j as u64);
            // K is quadratic in w2_j, so the difference quotient has no
            // truncation error and the step only trades rounding noise
            // (≈ 4ε|K|/h²). A wide step keeps that noise far below 1e-6 of
            // the probe even when later neurons contribute little.
            let (x, y) = (0.37, 0.81);
            let exact = feature_probe(&m, j, x, y).unwrap();
            let fd = probe_by_differences(&m, j, x, y, 1e-2);
            if j == 1 {
                let narrow = probe_by_differences(&m, j, x, y, 1e-4);
                assert!((exact - narrow).abs() / exact.abs() < 1e-6, "N={n} h=1e-4: {exact} vs {narrow}");
            }
            assert!(exact.abs() > 1e-3, "generic parameters give a nonzero probe");
            assert!((exact - fd).abs() / exact.abs() < 1e-6, "N={n} j={j}: {exact} vs {fd}");
        }
    }
}

#[test]
fn kernel_depends_on_outer_weights_at_every_width() {
    for n in [4usize, 64, 1024] {
        let m = random_zenn(n, 1.1, Activation::Sine, n as u64);
        let mut moved = m.clone();
        moved.neuron_mut(2).unwrap().w2 += 0.5;
        assert_ne!(zentk_eval(&m, 0.3, 0.9), zentk_eval(&moved, 0.3, 0.9), "N={n}");
    }
}

#[test]
fn kernel_increments_decay_at_the_derived_rate() {
    let pts: Vec<f64> = (0..8).map(|i| i as f64 / 7.0).collect();
    let widths = [16usize, 32, 64, 128, 256, 512];
    for alpha in [2.0, 3.0] {
        let mut slopes = Vec::new();
        for seed in 0..10u64 {
            let full = random_zenn(1024, alpha, Activation::Sine, seed);
            let gram = |n: usize| zentk_gram(&full.truncated(n).unwrap(), &pts).unwrap().entries;
            let d: Vec<f64> = widths
                .iter()
                .map(|&n| (gram(2 * n) - gram(n)).iter().fold(0.0f64, |a, v| a.max(v.abs())))
                .collect();
            let ln_n: Vec<f64> = widths.iter().map(|&n| (n as f64).ln()).collect();
            let ln_d: Vec<f64> = d.iter().map(|v| v.ln()).collect();
            slopes.push(zenn::stochastics::convergence::fit_slope(&ln_n, &ln_d));
        }
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        let expected = -(2.0 * alpha - 3.0);
        assert!((mean - expected).abs() < 0.5, "alpha {alpha}: slope {mean}");
    }
}

#[test]
fn small_step_training_respects_the_flow_bound() {
    let xs = [0.0, 0.2, 0.45, 0.7, 1.0];
    let ys: Vec<f64> = xs.iter().map(|&x| zenn::data::synth1d_target(x)).collect();
    let d = zenn::Dataset::from_scalars(&xs, &ys).unwrap();
    for eta in [1e-3, 5e-4] {
        let mut m = random_zenn(16, 1.1, Activation::Sine, 21);
        let mut trace = Vec::new();
        for step in 0..400 {
            let (l, g) = m.loss_grad(d.inputs(), d.targets()).unwrap();
            let lmin = zentk_gram(&m, &xs).unwrap().smallest_eigenvalue().unwrap();
            trace.push(SpectralSample { step, loss: l, lambda_min: lmin });
            let theta: Vec<f64> = m.params().iter().zip(&g).map(|(t, gi)| t - eta * gi).collect();
            m.set_params(&theta).unwrap();
        }
        let report = gronwall_diagnostic(&trace, eta).unwrap();
        assert_eq!(report.violations(), 0, "eta {eta}");
        assert!(report.steps.last().unwrap().loss < trace[0].loss);
    }
}

#[test]
fn empirical_kernel_of_a_one_layer_model() {
    let mut layer = Layer::kazenn(1, 1, 6, 1.2, Activation::Sine).unwrap();
    let shallow = random_zenn(6, 1.2, Activation::Sine, 8);
    layer.set_params(&shallow.params()).unwrap();
    let deep = DeepModel::new(vec![layer]).unwrap();
    let k: Array2<f64> = empirical_kernel(&deep, &[0.3], &[-0.6]).unwrap();
    assert!((k[[0, 0]] - zentk_eval(&shallow, 0.3, -0.6)).abs() < 1e-12);
}
