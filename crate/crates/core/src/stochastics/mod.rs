//! Random initialization and the stochastic structure of wide networks.

pub mod charfn;
pub mod convergence;
pub mod cumulants;
pub mod init;
pub mod kstat;

pub use charfn::{charfn_mc, charfn_relu_uniform, relu_uniform_spec, CharFnEstimate};
pub use convergence::{convergence_tail, sup_differences, ConvergenceReport, Family};
pub use cumulants::{
    cumulant_additivity, mlp_cumulant_scaling, perceptron_cumulant_mc, zenn_cumulant_series, CumulantReport, Width,
};
pub use init::{Dist, InitSpec};
pub use kstat::{excess_kurtosis, k_statistics, Estimate, KStatistics};
