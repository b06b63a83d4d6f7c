//! Characteristic functions of random ZeNN outputs.

use num_complex::Complex64;

use crate::activation::Activation;
use crate::error::{Result, ZennError};
use crate::stochastics::cumulants::{zenn_samples, MIN_SAMPLES};
use crate::stochastics::init::{Dist, InitSpec};

/// `sin(b)/b - 1` without cancellation near zero.
fn sinc_minus_one(b: f64) -> f64 {
    if b.abs() < 1e-3 {
        let b2 = b * b;
        -b2 / 6.0 + b2 * b2 / 120.0
    } else {
        b.sin() / b - 1.0
    }
}

fn sinc(b: f64) -> f64 {
    1.0 + sinc_minus_one(b)
}

/// `(e^{ia} sinc(b) - 1) / (i c)`, evaluated stably for small `a`, `b`.
fn branch_term(a: f64, b: f64, c: f64) -> Complex64 {
    let s = sinc(b);
    let half = (0.5 * a).sin();
    let re = -2.0 * half * half * s + sinc_minus_one(b);
    let im = a.sin() * s;
    // (re + i im) / (i c) = im / c - i re / c
    Complex64::new(im / c, -re / c)
}

/// Per-factor characteristic function `E[exp(i s σ(j W x + b))]` for ReLU with
/// `W ~ U(-L, L)`, `b ~ U(-B, B)` at frequency index `j` and argument `s`.
pub fn relu_uniform_factor(x: f64, s: f64, j: usize, l: f64, b: f64) -> Complex64 {
    if s == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let jxl = j as f64 * x * l;
    let first = if jxl <= b {
        branch_term(b * s, jxl * s, 2.0 * b * s)
    } else {
        branch_term(jxl * s, b * s, 2.0 * jxl * s)
    };
    first + 0.5
}

/// Closed-form characteristic function of `Σ_{j=1..N} j^(-α) ReLU(j W_j x + b_j)`
/// with `W_j ~ U(-L, L)` and `b_j ~ U(-B, B)` i.i.d.
///
/// Each factor uses the `jLx ≤ B` form or the `jLx > B` form of the
/// half-line integral; the two coincide at `jLx = B`.
pub fn charfn_relu_uniform(x: f64, t: f64, l: f64, b: f64, alpha: f64, n: usize) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(ZennError::InvalidParameter(format!("closed form requires x > 0, got {x}")));
    }
    if !(l > 0.0 && b > 0.0) {
        return Err(ZennError::InvalidParameter(format!("L and B must be positive, got L={l}, B={b}")));
    }
    Ok((1..=n)
        .map(|j| relu_uniform_factor(x, t * (j as f64).powf(-alpha), j, l, b))
        .product())
}

/// Parameter law matching [`charfn_relu_uniform`]: `w1 ~ U(-L, L)`, `b1 ~ U(-B, B)`,
/// `w2 = 1`, `b2 = 0`.
pub fn relu_uniform_spec(l: f64, b: f64, seed: u64) -> InitSpec {
    InitSpec {
        w1: Dist::Uniform { lo: -l, hi: l },
        b1: Dist::Uniform { lo: -b, hi: b },
        w2: Dist::Constant(1.0),
        b2: Dist::Constant(0.0),
        seed,
        fan_in_scaling: false,
    }
}

/// Monte-Carlo characteristic function with per-component standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharFnEstimate {
    pub value: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
}

impl CharFnEstimate {
    pub fn stderr(&self) -> f64 {
        self.stderr_re.hypot(self.stderr_im)
    }

    /// Both components within `k` of their standard errors.
    pub fn within(&self, target: Complex64, k: f64) -> bool {
        (self.value.re - target.re).abs() <= k * self.stderr_re && (self.value.im - target.im).abs() <= k * self.stderr_im
    }
}

/// Monte-Carlo average of `exp(i t f(x))` over width-`n` ZeNNs drawn from `spec`.
pub fn charfn_mc(spec: &InitSpec, activation: Activation, alpha: f64, n: usize, x: f64, t: f64, samples: usize) -> Result<CharFnEstimate> {
    if samples < MIN_SAMPLES {
        return Err(ZennError::InvalidParameter(format!(
            "Monte-Carlo needs at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let outputs = zenn_samples(spec, activation, alpha, n, x, samples)?;
    Ok(average_phase(&outputs, t))
}

/// Sample mean of `exp(i t y)` with standard errors of each component.
pub fn average_phase(outputs: &[f64], t: f64) -> CharFnEstimate {
    let m = outputs.len() as f64;
    let (mut sc, mut ss, mut sc2, mut ss2) = (0.0, 0.0, 0.0, 0.0);
    for y in outputs {
        let (s, c) = (t * y).sin_cos();
        sc += c;
        ss += s;
        sc2 += c * c;
        ss2 += s * s;
    }
    let (mc, ms) = (sc / m, ss / m);
    let var_c = ((sc2 / m - mc * mc) * m / (m - 1.0)).max(0.0);
    let var_s = ((ss2 / m - ms * ms) * m / (m - 1.0)).max(0.0);
    CharFnEstimate { value: Complex64::new(mc, ms), stderr_re: (var_c / m).sqrt(), stderr_im: (var_s / m).sqrt() }
}
