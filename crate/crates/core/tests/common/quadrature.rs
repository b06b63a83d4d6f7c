//! Piecewise Gauss–Legendre quadrature, used as an independent oracle for
//! the ReLU-uniform characteristic function.
#![allow(dead_code)]

use num_complex::Complex64;

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        out.push((z, 2.0 / ((1.0 - z * z) * dp * dp)));
    }
    out
}

/// `∫ f` over `[a, b]` split at the sorted `breaks` inside it.
pub fn integrate<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, breaks: &[f64], rule: &[(f64, f64)]) -> Complex64 {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&p| p > a && p < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    let mut total = Complex64::new(0.0, 0.0);
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for &(z, wt) in rule {
            total += f(mid + half * z) * (wt * half);
        }
    }
    total
}

/// `E[exp(i s ReLU(j W x + b))]` with `W ~ U(-L, L)`, `b ~ U(-B, B)` by
/// 2D quadrature, split where the ReLU argument changes sign.
pub fn relu_uniform_factor_quadrature(x: f64, s: f64, j: usize, l: f64, bb: f64) -> Complex64 {
    let rule = gauss_legendre(40);
    let jx = j as f64 * x;
    let inner = |w: f64| {
        let kink = -jx * w;
        let f = |b: f64| Complex64::from_polar(1.0, s * (jx * w + b).max(0.0));
        integrate(&f, -bb, bb, &[kink], &rule)
    };
    let wbreaks = [-bb / jx, bb / jx];
    integrate(&inner, -l, l, &wbreaks, &rule) / (4.0 * l * bb)
}

pub fn relu_uniform_charfn_quadrature(x: f64, t: f64, l: f64, b: f64, alpha: f64, n: usize) -> Complex64 {
    (1..=n).map(|j| relu_uniform_factor_quadrature(x, t * (j as f64).powf(-alpha), j, l, b)).product()
}
