//! `zenn image-regress`: coordinate-to-RGB regression on a PPM image.
//!
//! Every variant shares the same trunk: `hidden_layers` ReLU dense layers of
//! `hidden_width` units and a linear 3-unit output. Only the first hidden
//! layer differs.

use std::fmt;
use std::io::Write as _;
use std::str::FromStr;

use serde::Deserialize;
use zenn::data::{load_ppm, random_split_image, save_ppm};
use zenn::rng::sub_seed;
use zenn::serialize::{serialize_model, AnyModel};
use zenn::training::{psnr, train_gd};
use zenn::{Activation, DeepModel, Layer, Regressor, Split};

use crate::config::{create_output, InitSection, Loaded, TrainSection};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Mlp,
    OZeNN,
    RadZeNN,
    RandoZeNN,
    Ff,
    FfTrainable,
}

impl Variant {
    pub const ALL: [Variant; 6] =
        [Variant::Mlp, Variant::OZeNN, Variant::RadZeNN, Variant::RandoZeNN, Variant::Ff, Variant::FfTrainable];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Mlp => "MLP",
            Variant::OZeNN => "oZeNN",
            Variant::RadZeNN => "radZeNN",
            Variant::RandoZeNN => "randoZeNN",
            Variant::Ff => "FF",
            Variant::FfTrainable => "FF-trainable",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = CliError;

    /// Case-insensitive; `_` and `-` are interchangeable.
    fn from_str(s: &str) -> CliResult<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Variant::ALL.into_iter().find(|v| v.name().to_ascii_lowercase() == key).ok_or_else(|| {
            let valid: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
            CliError::config(format!("unknown model variant {s:?}; valid variants: {}", valid.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageExperiment {
    #[serde(default)]
    pub seed: u64,
    pub image: ImageSection,
    pub model: ImageModel,
    #[serde(default)]
    pub init: InitSection,
    #[serde(default)]
    pub train: TrainSection,
    pub output: ImageOutput,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageSection {
    pub path: String,
    #[serde(default = "default_fraction")]
    pub train_fraction: f64,
}

fn default_fraction() -> f64 {
    0.75
}

/// Architecture. `n`, `m`, `alpha` and `rho` are read by the variants that
/// use them; `first_width` only by the MLP.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImageModel {
    pub variant: String,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub rho: f64,
    pub first_width: usize,
    pub hidden_width: usize,
    pub hidden_layers: usize,
}

impl Default for ImageModel {
    fn default() -> Self {
        Self {
            variant: "MLP".into(),
            n: 256,
            m: 16384,
            alpha: 0.0,
            rho: 10.0,
            first_width: 2048,
            hidden_width: 256,
            hidden_layers: 3,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageOutput {
    pub trace: String,
    /// Predicted image over every pixel.
    pub image: String,
    pub model: Option<String>,
}

/// Paired sine and cosine copies of one first-layer kind.
fn sin_cos(make: impl Fn(Activation) -> zenn::Result<Layer>) -> zenn::Result<Layer> {
    Layer::parallel(vec![make(Activation::Sine)?, make(Activation::Cosine)?])
}

impl ImageModel {
    pub fn variant(&self) -> CliResult<Variant> {
        self.variant.parse()
    }

    /// The first hidden layer of a variant on `dim`-dimensional inputs.
    pub fn first_layer(&self, dim: usize, seed: u64) -> CliResult<Layer> {
        let (n, m, a) = (self.n, self.m, self.alpha);
        let layer = match self.variant()? {
            Variant::Mlp => Layer::dense(dim, self.first_width, 0.0, Activation::ReLU),
            Variant::OZeNN => sin_cos(|act| Layer::ozenn(dim, n, a, act)),
            Variant::RadZeNN => sin_cos(|act| Layer::radzenn(dim, n, a, act)),
            Variant::RandoZeNN => sin_cos(|act| {
                Layer::randozenn(dim, n, m, a, act, sub_seed(seed, &format!("randozenn-{}", act.name())))
            }),
            Variant::Ff => Layer::fourier(dim, n, self.rho, false, sub_seed(seed, "fourier")),
            Variant::FfTrainable => Layer::fourier(dim, n, self.rho, true, sub_seed(seed, "fourier")),
        }?;
        Ok(layer)
    }

    /// The full network, not yet initialized.
    pub fn build(&self, input_dim: usize, output_dim: usize, seed: u64) -> CliResult<DeepModel> {
        if self.hidden_width == 0 {
            return Err(CliError::config("hidden_width must be positive"));
        }
        let mut layers = vec![self.first_layer(input_dim, seed)?];
        for _ in 0..self.hidden_layers {
            let width = layers.last().expect("nonempty").output_dim();
            layers.push(Layer::dense(width, self.hidden_width, 0.0, Activation::ReLU)?);
        }
        let width = layers.last().expect("nonempty").output_dim();
        layers.push(Layer::dense(width, output_dim, 0.0, Activation::Identity)?);
        Ok(DeepModel::new(layers)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageSummary {
    pub variant: Variant,
    pub epochs: usize,
    pub train_mse: f64,
    pub val_psnr: f64,
}

pub fn run(cfg: &Loaded<ImageExperiment>) -> CliResult<ImageSummary> {
    let c = &cfg.config;
    let variant = c.model.variant()?;
    let train = c.train.config(c.seed, true)?;
    let spec = c.init.spec(c.seed, "init")?;
    let path = cfg.resolve(&c.image.path);
    if !path.exists() {
        return Err(CliError::missing_file(path));
    }
    let image = random_split_image(load_ppm(&path)?, c.image.train_fraction, c.seed)?;
    let data = image.to_dataset()?;

    let mut model = c.model.build(2, 3, c.seed)?;
    spec.init_deep(&mut model)?;
    log::info!(
        "{variant}: {} parameters, {}x{} image, {} training pixels",
        model.num_params(),
        image.width(),
        image.height(),
        data.count(Split::Train)
    );
    let (model, trace) = train_gd(&model, &data, &train)?;

    trace.write_csv(create_output(&cfg.resolve(&c.output.trace))?)?;
    let pred = model.predict(image.coords())?;
    let (vx, vy) = data.subset(Split::Validation);
    let val_psnr = psnr(model.predict(vx.view())?.view(), vy.view(), 1.0)?;
    let out = cfg.resolve(&c.output.image);
    create_output(&out)?;
    save_ppm(&image.with_colors(pred)?, &out)?;
    if let Some(p) = &c.output.model {
        let p = cfg.resolve(p);
        let text = serialize_model(&AnyModel::Deep(model));
        create_output(&p)?.write_all(text.as_bytes()).map_err(|e| CliError::io(&p, e))?;
    }
    let last = trace.last().expect("the final epoch is always logged");
    Ok(ImageSummary { variant, epochs: last.epoch, train_mse: last.train_mse, val_psnr })
}
