//! Scalar activations and their derivatives.

use std::fmt;
use std::str::FromStr;

use crate::error::ZennError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Sine,
    Cosine,
    ReLU,
    Sigmoid,
    Identity,
}

impl Activation {
    pub const ALL: [Activation; 5] = [
        Activation::Sine,
        Activation::Cosine,
        Activation::ReLU,
        Activation::Sigmoid,
        Activation::Identity,
    ];

    #[inline]
    pub fn value(self, x: f64) -> f64 {
        match self {
            Activation::Sine => x.sin(),
            Activation::Cosine => x.cos(),
            Activation::ReLU => x.max(0.0),
            Activation::Sigmoid => sigmoid(x),
            Activation::Identity => x,
        }
    }

    /// Derivative. ReLU uses 0 at the kink.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Sine => x.cos(),
            Activation::Cosine => -x.sin(),
            Activation::ReLU => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
            Activation::Identity => 1.0,
        }
    }

    /// Value and derivative in one call; sine/cosine share the `sin_cos` evaluation.
    #[inline]
    pub fn eval(self, x: f64) -> (f64, f64) {
        match self {
            Activation::Sine => x.sin_cos(),
            Activation::Cosine => {
                let (s, c) = x.sin_cos();
                (c, -s)
            }
            _ => (self.value(x), self.derivative(x)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Sine => "sine",
            Activation::Cosine => "cosine",
            Activation::ReLU => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Identity => "identity",
        }
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Returns `(σ(x), σ'(x))`.
pub fn activation_eval(act: Activation, x: f64) -> (f64, f64) {
    act.eval(x)
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = ZennError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sine" | "sin" => Ok(Activation::Sine),
            "cosine" | "cos" => Ok(Activation::Cosine),
            "relu" => Ok(Activation::ReLU),
            "sigmoid" | "sig" => Ok(Activation::Sigmoid),
            "identity" | "linear" => Ok(Activation::Identity),
            other => Err(ZennError::InvalidParameter(format!(
                "unknown activation `{other}` (expected sine, cosine, relu, sigmoid, identity)"
            ))),
        }
    }
}
