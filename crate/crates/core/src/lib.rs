//! Zeta neural networks (ZeNNs).
//!
//! A shallow ZeNN sums frequency-scaled perceptrons weighted by a fixed,
//! non-learnable `j^(-α)` factor:
//!
//! ```text
//! f(x) = Σ_{j=1..N} j^(-α) ( w2_j σ(w1_j · j · x + b1_j) + b2_j )
//! ```
//!
//! The crate provides exact forward evaluation and hand-derived gradients for
//! shallow ZeNNs, shallow MLPs and a zoo of deep layers ([`layers`]), the
//! closed-form tangent kernel ([`zentk`]), cumulant and characteristic-function
//! machinery ([`stochastics`]), full-batch gradient descent ([`training`]) and
//! dataset/image helpers ([`data`]).

pub mod activation;
pub mod data;
pub mod error;
pub mod gradcheck;
pub mod layers;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod serialize;
pub mod shallow;
pub mod stochastics;
pub mod training;
pub mod zentk;

pub use activation::{activation_eval, Activation};
pub use error::{Result, ZennError};
pub use layers::Layer;
pub use model::{DeepModel, Regressor};
pub use training::{Dataset, Split, TrainConfig, TrainTrace};
pub use shallow::{NeuronParams, ShallowMLP, ShallowZeNN};
