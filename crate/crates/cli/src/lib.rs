//! Experiment drivers behind the `zenn` binary.
//!
//! Each subcommand reads one TOML experiment file, runs it and writes CSV
//! reports (and, for training, a model file and reconstructed image).
//! Seeds for independent random streams are derived from the experiment's
//! top-level `seed` with [`zenn::rng::sub_seed`] and a fixed label per
//! stream (`"init"`, `"split"`, `"synth1d"`, `"charfn-<k>"`, ...).

pub mod analysis;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod image;
pub mod train;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "zenn", version, about = "Zeta neural network experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Arguments shared by every subcommand.
#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Experiment file (TOML).
    pub config: PathBuf,
    /// Override one config value, e.g. `--set train.epochs=0`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a shallow ZeNN or MLP on synthetic or Jena data.
    Train(RunArgs),
    /// Fit RGB values from pixel coordinates.
    ImageRegress(RunArgs),
    /// Tangent-kernel Gram matrix, spectrum, feature probe and flow bound.
    Zentk(RunArgs),
    /// Analytic cumulant series against Monte-Carlo k-statistics.
    Cumulants(RunArgs),
    /// ReLU characteristic function, closed form and Monte-Carlo.
    Charfn(RunArgs),
    /// Width-doubling sup-differences of nested random networks.
    Converge(RunArgs),
    /// Emit the synthetic 1D dataset as CSV.
    Synth1d(RunArgs),
}

fn load<T: serde::de::DeserializeOwned>(args: &RunArgs) -> CliResult<config::Loaded<T>> {
    config::load(Path::new(&args.config), &args.overrides)
}

/// Runs one command and returns its one-line summary.
pub fn run(command: &Command) -> CliResult<String> {
    match command {
        Command::Train(a) => {
            let s = train::run(&load(a)?)?;
            let val = s.val_mse.map(|v| format!(", val_mse {v:e}")).unwrap_or_default();
            Ok(format!("epoch {}: train_mse {:e}{val}", s.epochs, s.train_mse))
        }
        Command::ImageRegress(a) => {
            let s = image::run(&load(a)?)?;
            Ok(format!("{} epoch {}: train_mse {:e}, val_psnr {:.3} dB", s.variant, s.epochs, s.train_mse, s.val_psnr))
        }
        Command::Zentk(a) => analysis::zentk(&load(a)?),
        Command::Cumulants(a) => analysis::cumulants(&load(a)?),
        Command::Charfn(a) => analysis::charfn(&load(a)?),
        Command::Converge(a) => analysis::converge(&load(a)?),
        Command::Synth1d(a) => analysis::synth1d_cmd(&load(a)?),
    }
}
