//! Report commands: `zentk`, `cumulants`, `charfn`, `converge`, `synth1d`.

use serde::Deserialize;
use zenn::data::{synth1d, synth1d_target};
use zenn::rng::sub_seed;
use zenn::stochastics::cumulants::zenn_cumulants_mc;
use zenn::stochastics::kstat::MAX_ORDER;
use zenn::stochastics::{
    charfn_mc, charfn_relu_uniform, convergence_tail, cumulant_additivity, relu_uniform_spec, zenn_cumulant_series,
    Family, Width,
};
use zenn::zentk::{feature_probe, gronwall_diagnostic, zentk_gram, SpectralSample};
use zenn::{Activation, Dataset, Regressor};

use crate::config::{self, create_output, real, write_csv, Grid, InitSection, Loaded};
use crate::error::{CliError, CliResult};

fn opt(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

/// Either an explicit list of points or an evenly spaced grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSet {
    pub values: Option<Vec<f64>>,
    pub grid: Option<Grid>,
}

impl PointSet {
    pub fn points(&self) -> CliResult<Vec<f64>> {
        match (&self.values, &self.grid) {
            (Some(v), None) if !v.is_empty() => Ok(v.clone()),
            (None, Some(g)) => g.points(),
            _ => Err(CliError::config("points needs exactly one of `values` (nonempty) or `grid`")),
        }
    }
}

// ---------------------------------------------------------------- zentk

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZentkExperiment {
    #[serde(default)]
    pub seed: u64,
    pub model: ZennModel,
    #[serde(default)]
    pub init: InitSection,
    pub points: PointSet,
    pub probe: Option<ProbeSection>,
    pub gronwall: Option<GronwallSection>,
    pub output: ZentkOutput,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZennModel {
    pub width: usize,
    pub alpha: f64,
    #[serde(default = "sine")]
    pub activation: String,
}

fn sine() -> String {
    "sine".into()
}

/// Second derivatives of `K(x, y)` in the outer weights of neurons `j`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub neurons: Vec<usize>,
    pub x: f64,
    pub y: f64,
}

/// Gradient descent on the synthetic target at the kernel points, tracking
/// the loss against the flow bound built from the smallest eigenvalue.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GronwallSection {
    pub steps: usize,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZentkOutput {
    pub gram: String,
    pub spectrum: String,
    pub probe: Option<String>,
    pub gronwall: Option<String>,
}

pub fn zentk(cfg: &Loaded<ZentkExperiment>) -> CliResult<String> {
    let c = &cfg.config;
    let act = config::activation(&c.model.activation)?;
    let model = c.init.spec(c.seed, "init")?.shallow_zenn(c.model.width, c.model.alpha, act)?;
    let points = c.points.points()?;
    let gram = zentk_gram(&model, &points)?;
    gram.write_csv(create_output(&cfg.resolve(&c.output.gram))?)?;
    let eig = gram.eigenvalues()?;
    let rows: Vec<Vec<String>> = eig.iter().enumerate().map(|(i, v)| vec![i.to_string(), real(*v)]).collect();
    write_csv(&cfg.resolve(&c.output.spectrum), &["index", "eigenvalue"], &rows)?;
    let mut summary = format!("λ_min = {:e}, λ_max = {:e}", eig[0], eig[eig.len() - 1]);

    if let Some(p) = &c.probe {
        let path = c.output.probe.as_deref().ok_or_else(|| CliError::config("[probe] needs output.probe"))?;
        let rows = p
            .neurons
            .iter()
            .map(|&j| Ok(vec![j.to_string(), real(p.x), real(p.y), real(feature_probe(&model, j, p.x, p.y)?)]))
            .collect::<CliResult<Vec<_>>>()?;
        write_csv(&cfg.resolve(path), &["j", "x", "y", "probe"], &rows)?;
    }

    if let Some(g) = &c.gronwall {
        let path = c.output.gronwall.as_deref().ok_or_else(|| CliError::config("[gronwall] needs output.gronwall"))?;
        let targets: Vec<f64> = points.iter().map(|&x| synth1d_target(x)).collect();
        let data = Dataset::from_scalars(&points, &targets)?;
        let mut m = model.clone();
        let mut samples = Vec::with_capacity(g.steps + 1);
        for step in 0..=g.steps {
            let (loss, grad) = m.loss_grad(data.inputs(), data.targets())?;
            let lambda_min = zentk_gram(&m, &points)?.smallest_eigenvalue()?;
            samples.push(SpectralSample { step, loss, lambda_min });
            let theta: Vec<f64> = m.params().iter().zip(&grad).map(|(t, d)| t - g.learning_rate * d).collect();
            m.set_params(&theta)?;
        }
        let report = gronwall_diagnostic(&samples, g.learning_rate)?;
        let rows: Vec<Vec<String>> = report
            .steps
            .iter()
            .zip(&samples)
            .map(|(s, sample)| {
                vec![
                    s.step.to_string(),
                    real(s.time),
                    real(s.loss),
                    real(sample.lambda_min),
                    real(s.bound),
                    real(s.margin),
                    u8::from(s.violated).to_string(),
                ]
            })
            .collect();
        write_csv(
            &cfg.resolve(path),
            &["step", "time", "loss", "lambda_min", "bound", "margin", "violated"],
            &rows,
        )?;
        summary.push_str(&format!(", flow-bound violations: {}", report.violations()));
    }
    Ok(summary)
}

// ---------------------------------------------------------------- cumulants

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum WidthSpec {
    Finite(usize),
    Named(InfiniteWidth),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfiniteWidth {
    Infinite,
}

impl WidthSpec {
    fn width(self) -> Width {
        match self {
            WidthSpec::Finite(n) => Width::Finite(n),
            WidthSpec::Named(_) => Width::Infinite,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CumulantsExperiment {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "sine")]
    pub activation: String,
    pub alpha: f64,
    pub width: WidthSpec,
    pub x: Vec<f64>,
    #[serde(default = "default_orders")]
    pub orders: Vec<usize>,
    /// Per-perceptron cumulant `λ^(r)(jx)` taken as this constant for every
    /// order. When absent it is estimated by Monte-Carlo for each `j`.
    pub lambda: Option<f64>,
    /// Monte-Carlo draws for the width-N network (0 skips the comparison).
    #[serde(default)]
    pub samples: usize,
    #[serde(default)]
    pub init: InitSection,
    pub output: ReportOutput,
}

fn default_orders() -> Vec<usize> {
    vec![2, 3, 4]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportOutput {
    pub report: String,
}

pub const CUMULANT_HEADER: [&str; 8] =
    ["order", "x", "width", "analytic", "analytic_stderr", "monte_carlo", "monte_carlo_stderr", "z_score"];

pub fn cumulants(cfg: &Loaded<CumulantsExperiment>) -> CliResult<String> {
    let c = &cfg.config;
    let act = config::activation(&c.activation)?;
    let width = c.width.width();
    if c.orders.is_empty() || c.orders.iter().any(|&r| r == 0 || r > MAX_ORDER) {
        return Err(CliError::config(format!("orders must lie in 1..={MAX_ORDER}")));
    }
    let max_order = *c.orders.iter().max().expect("nonempty");
    let width_label = match width {
        Width::Finite(n) => n.to_string(),
        Width::Infinite => "inf".into(),
    };
    let mut rows = Vec::new();
    for (k, &x) in c.x.iter().enumerate() {
        let spec = c.init.spec(c.seed, &format!("cumulants-{k}"))?;
        match (c.lambda, width) {
            (Some(lambda), _) => {
                let mc = match width {
                    Width::Finite(n) if c.samples > 0 => {
                        Some(zenn_cumulants_mc(&spec, act, c.alpha, n, x, max_order, c.samples)?)
                    }
                    _ => None,
                };
                for &r in &c.orders {
                    let analytic = zenn_cumulant_series(|_| lambda, r, c.alpha, x, width, 0)?;
                    let est = mc.as_ref().map(|m| m.order(r));
                    rows.push(vec![
                        r.to_string(),
                        real(x),
                        width_label.clone(),
                        real(analytic),
                        real(0.0),
                        opt(est.map(|e| e.value)),
                        opt(est.map(|e| e.stderr)),
                        opt(est.map(|e| e.z_score(analytic))),
                    ]);
                }
            }
            (None, Width::Finite(n)) => {
                if c.samples == 0 {
                    return Err(CliError::config("estimating lambda needs samples > 0"));
                }
                let reports = cumulant_additivity(&spec, act, c.alpha, n, x, max_order, c.samples)?;
                for &r in &c.orders {
                    let rep = &reports[r - 1];
                    rows.push(vec![
                        r.to_string(),
                        real(x),
                        width_label.clone(),
                        real(rep.analytic),
                        real(rep.analytic_stderr),
                        real(rep.mc.value),
                        real(rep.mc.stderr),
                        real(rep.z_score()),
                    ]);
                }
            }
            (None, Width::Infinite) => {
                return Err(CliError::config("infinite width needs an explicit lambda"));
            }
        }
    }
    write_csv(&cfg.resolve(&c.output.report), &CUMULANT_HEADER, &rows)?;
    Ok(format!("{} rows", rows.len()))
}

// ---------------------------------------------------------------- charfn

/// Characteristic function of a ReLU ZeNN with `W1 ~ U(−L, L)`,
/// `b1 ~ U(−B, B)`, `W2 ≡ 1`, `b2 ≡ 0`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharfnExperiment {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub l: f64,
    #[serde(default = "one")]
    pub b: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    pub width: usize,
    /// `(x, t)` pairs.
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub samples: usize,
    pub output: ReportOutput,
}

fn one() -> f64 {
    1.0
}

pub const CHARFN_HEADER: [&str; 8] = ["x", "t", "re", "im", "mc_re", "mc_im", "mc_stderr_re", "mc_stderr_im"];

pub fn charfn(cfg: &Loaded<CharfnExperiment>) -> CliResult<String> {
    let c = &cfg.config;
    if c.points.is_empty() {
        return Err(CliError::config("points must be nonempty"));
    }
    let mut rows = Vec::new();
    let mut worst_z = 0.0f64;
    for (k, &[x, t]) in c.points.iter().enumerate() {
        let phi = charfn_relu_uniform(x, t, c.l, c.b, c.alpha, c.width)?;
        let mut row = vec![real(x), real(t), real(phi.re), real(phi.im)];
        if c.samples > 0 {
            let spec = relu_uniform_spec(c.l, c.b, sub_seed(c.seed, &format!("charfn-{k}")));
            let mc = charfn_mc(&spec, Activation::ReLU, c.alpha, c.width, x, t, c.samples)?;
            for (d, s) in [(mc.value.re - phi.re, mc.stderr_re), (mc.value.im - phi.im, mc.stderr_im)] {
                if s > 0.0 {
                    worst_z = worst_z.max(d.abs() / s);
                }
            }
            row.extend([real(mc.value.re), real(mc.value.im), real(mc.stderr_re), real(mc.stderr_im)]);
        } else {
            row.extend(std::iter::repeat_n(String::new(), 4));
        }
        rows.push(row);
    }
    write_csv(&cfg.resolve(&c.output.report), &CHARFN_HEADER, &rows)?;
    Ok(if c.samples > 0 { format!("{} points, worst |z| = {worst_z:.2}", rows.len()) } else { format!("{} points", rows.len()) })
}

// ---------------------------------------------------------------- converge

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    Zenn,
    Mlp,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeExperiment {
    #[serde(default)]
    pub seed: u64,
    pub family: FamilyName,
    #[serde(default = "two")]
    pub alpha: f64,
    #[serde(default = "half")]
    pub beta: f64,
    #[serde(default = "sine")]
    pub activation: String,
    pub widths: Vec<usize>,
    pub grid: Grid,
    /// Independent nested draws averaged in log space.
    #[serde(default = "twenty")]
    pub draws: usize,
    #[serde(default)]
    pub init: InitSection,
    pub output: ReportOutput,
}

fn two() -> f64 {
    2.0
}

fn half() -> f64 {
    0.5
}

fn twenty() -> usize {
    20
}

pub fn converge(cfg: &Loaded<ConvergeExperiment>) -> CliResult<String> {
    let c = &cfg.config;
    let act = config::activation(&c.activation)?;
    let family = match c.family {
        FamilyName::Zenn => Family::ZeNN { alpha: c.alpha },
        FamilyName::Mlp => Family::Mlp { beta: c.beta },
    };
    let spec = c.init.spec(c.seed, "init")?;
    let seeds: Vec<u64> = (0..c.draws).map(|i| sub_seed(c.seed, &format!("converge-{i}"))).collect();
    let report = convergence_tail(family, act, &spec, &c.widths, &c.grid.points()?, &seeds)?;
    let rows: Vec<Vec<String>> = report
        .widths
        .iter()
        .zip(&report.sup_diff)
        .map(|(n, d)| vec![n.to_string(), real(*d), real(d.log2())])
        .collect();
    write_csv(&cfg.resolve(&c.output.report), &["width", "sup_diff", "log2_sup_diff"], &rows)?;
    Ok(format!("fitted slope {:.4}, final D = {:e}", report.slope, report.sup_diff.last().expect("nonempty")))
}

// ---------------------------------------------------------------- synth1d

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Synth1dExperiment {
    #[serde(default)]
    pub seed: u64,
    pub points: usize,
    #[serde(default)]
    pub x_min: f64,
    #[serde(default = "two")]
    pub x_max: f64,
    #[serde(default)]
    pub noise_std: f64,
    pub output: DataOutput,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataOutput {
    pub data: String,
}

pub fn synth1d_cmd(cfg: &Loaded<Synth1dExperiment>) -> CliResult<String> {
    let c = &cfg.config;
    let d = synth1d(c.points, (c.x_min, c.x_max), c.seed, c.noise_std)?;
    let rows: Vec<Vec<String>> =
        d.inputs().column(0).iter().zip(d.targets().column(0)).map(|(x, y)| vec![real(*x), real(*y)]).collect();
    write_csv(&cfg.resolve(&c.output.data), &["x", "y"], &rows)?;
    Ok(format!("{} points", rows.len()))
}
