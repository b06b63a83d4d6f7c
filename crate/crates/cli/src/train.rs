//! `zenn train`: shallow networks on the synthetic curve or the Jena series.

use std::io::Write as _;

use serde::Deserialize;
use zenn::data::{load_jena_csv, random_split, synth1d, JENA_COLUMN, JENA_ROWS};
use zenn::serialize::{serialize_model, AnyModel};
use zenn::training::train_gd;
use zenn::{Dataset, Regressor, TrainTrace};

use crate::config::{self, create_output, InitSection, Loaded, TrainSection};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Synth1d,
    Jena,
    Image,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainExperiment {
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub data: DataSection,
    pub model: ShallowModel,
    #[serde(default)]
    pub init: InitSection,
    #[serde(default)]
    pub train: TrainSection,
    pub output: TrainOutput,
}

/// Dataset parameters. Synthetic fields apply to `synth1d`, file fields to `jena`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub noise_std: f64,
    pub path: Option<String>,
    pub column: String,
    pub max_rows: usize,
    /// Hold out the rest for validation; absent means train on everything.
    pub train_fraction: Option<f64>,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            points: 200,
            x_min: 0.0,
            x_max: 2.0,
            noise_std: 0.0,
            path: None,
            column: JENA_COLUMN.into(),
            max_rows: JENA_ROWS,
            train_fraction: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShallowKind {
    Zenn,
    Mlp,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShallowModel {
    pub kind: ShallowKind,
    pub width: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_activation")]
    pub activation: String,
}

fn default_alpha() -> f64 {
    1.1
}

fn default_beta() -> f64 {
    0.5
}

fn default_activation() -> String {
    "sine".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainOutput {
    pub trace: String,
    pub model: Option<String>,
}

/// Final numbers of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub epochs: usize,
    pub train_mse: f64,
    pub val_mse: Option<f64>,
}

fn dataset(cfg: &Loaded<TrainExperiment>) -> CliResult<Dataset> {
    let c = &cfg.config;
    let d = &c.data;
    let data = match c.task {
        Task::Synth1d => synth1d(d.points, (d.x_min, d.x_max), c.seed, d.noise_std)?,
        Task::Jena => {
            let path = d.path.as_deref().ok_or_else(|| CliError::config("task \"jena\" needs data.path"))?;
            let path = cfg.resolve(path);
            if !path.exists() {
                return Err(CliError::missing_file(path));
            }
            load_jena_csv(path, &d.column, d.max_rows)?
        }
        Task::Image => return Err(CliError::config("image experiments run with `zenn image-regress`")),
    };
    match d.train_fraction {
        Some(f) => Ok(random_split(data, f, c.seed)?),
        None => Ok(data),
    }
}

fn fit<M: Regressor + Into<AnyModel>>(
    cfg: &Loaded<TrainExperiment>,
    model: M,
    data: &Dataset,
) -> CliResult<(AnyModel, TrainTrace)> {
    let c = &cfg.config;
    let train = c.train.config(c.seed, false)?;
    log::info!("training {} parameters for {} epochs on {} samples", model.num_params(), train.epochs, data.len());
    let (trained, trace) = train_gd(&model, data, &train)?;
    Ok((trained.into(), trace))
}

pub fn run(cfg: &Loaded<TrainExperiment>) -> CliResult<TrainSummary> {
    let c = &cfg.config;
    let act = config::activation(&c.model.activation)?;
    let spec = c.init.spec(c.seed, "init")?;
    let data = dataset(cfg)?;
    if data.input_dim() != 1 || data.target_dim() != 1 {
        return Err(CliError::config("shallow models need scalar inputs and targets"));
    }
    let (model, trace) = match c.model.kind {
        ShallowKind::Zenn => fit(cfg, spec.shallow_zenn(c.model.width, c.model.alpha, act)?, &data)?,
        ShallowKind::Mlp => fit(cfg, spec.shallow_mlp(c.model.width, c.model.beta, act)?, &data)?,
    };

    let trace_path = cfg.resolve(&c.output.trace);
    trace.write_csv(create_output(&trace_path)?)?;
    if let Some(p) = &c.output.model {
        let p = cfg.resolve(p);
        create_output(&p)?.write_all(serialize_model(&model).as_bytes()).map_err(|e| CliError::io(&p, e))?;
    }
    let last = trace.last().expect("the final epoch is always logged");
    Ok(TrainSummary { epochs: last.epoch, train_mse: last.train_mse, val_mse: last.val_mse })
}
