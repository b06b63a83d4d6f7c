//! Loss, full-batch gradient descent and regression metrics.

use std::io::Write;
use std::time::Instant;

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Result, ZennError};
use crate::model::Regressor;
use crate::shallow::ShallowZeNN;
use crate::zentk::zentk_eval;

/// Which part of a dataset a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Validation,
}

/// Paired inputs and targets, one row per sample, with split labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Array2<f64>,
    targets: Array2<f64>,
    split: Vec<Split>,
}

impl Dataset {
    /// All samples start in the training split.
    pub fn new(inputs: Array2<f64>, targets: Array2<f64>) -> Result<Self> {
        if inputs.nrows() != targets.nrows() {
            return Err(ZennError::DimensionMismatch { expected: inputs.nrows(), got: targets.nrows() });
        }
        let split = vec![Split::Train; inputs.nrows()];
        Ok(Self { inputs, targets, split })
    }

    /// Scalar-to-scalar dataset from paired slices.
    pub fn from_scalars(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(ZennError::DimensionMismatch { expected: xs.len(), got: ys.len() });
        }
        let col = |v: &[f64]| Array2::from_shape_vec((v.len(), 1), v.to_vec()).expect("column shape");
        Self::new(col(xs), col(ys))
    }

    pub fn with_split(mut self, split: Vec<Split>) -> Result<Self> {
        if split.len() != self.len() {
            return Err(ZennError::DimensionMismatch { expected: self.len(), got: split.len() });
        }
        self.split = split;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.ncols()
    }

    pub fn target_dim(&self) -> usize {
        self.targets.ncols()
    }

    pub fn inputs(&self) -> ArrayView2<'_, f64> {
        self.inputs.view()
    }

    pub fn targets(&self) -> ArrayView2<'_, f64> {
        self.targets.view()
    }

    pub fn split(&self) -> &[Split] {
        &self.split
    }

    pub fn count(&self, which: Split) -> usize {
        self.split.iter().filter(|&&s| s == which).count()
    }

    /// Copies of the inputs and targets in one split, in dataset order.
    pub fn subset(&self, which: Split) -> (Array2<f64>, Array2<f64>) {
        let rows: Vec<usize> = (0..self.len()).filter(|&i| self.split[i] == which).collect();
        (self.inputs.select(Axis(0), &rows), self.targets.select(Axis(0), &rows))
    }
}

/// Full-batch gradient descent settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Kept for record-keeping; initialization is done before training, so the
    /// update rule itself draws no random numbers.
    pub seed: u64,
    pub log_interval: usize,
    /// Coefficient of the `½ wd ‖θ‖²` penalty.
    pub weight_decay: f64,
    /// Report validation PSNR (peak value 1) in the trace.
    pub report_psnr: bool,
    /// Record elapsed seconds per logged epoch. Off by default so that traces
    /// are byte-reproducible.
    pub log_wall_time: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.25,
            epochs: 1000,
            seed: 0,
            log_interval: 100,
            weight_decay: 0.0,
            report_psnr: false,
            log_wall_time: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(ZennError::InvalidParameter(format!(
                "learning rate must be finite and nonnegative, got {}",
                self.learning_rate
            )));
        }
        if self.log_interval == 0 {
            return Err(ZennError::InvalidParameter("log interval must be positive".into()));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(ZennError::InvalidParameter(format!(
                "weight decay must be finite and nonnegative, got {}",
                self.weight_decay
            )));
        }
        Ok(())
    }
}

/// One logged epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: Option<f64>,
    pub psnr: Option<f64>,
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainTrace {
    pub records: Vec<TraceRecord>,
}

impl TrainTrace {
    pub const CSV_HEADER: [&'static str; 5] = ["epoch", "train_mse", "val_mse", "psnr", "wall_time_s"];

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Writes the trace as CSV; absent values become empty fields.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.epoch.to_string(),
                format!("{:e}", r.train_mse),
                opt(r.val_mse),
                opt(r.psnr),
                opt(r.wall_time_s),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn train_view(dataset: &Dataset) -> Result<(Array2<f64>, Array2<f64>)> {
    let (x, y) = dataset.subset(Split::Train);
    if x.nrows() == 0 {
        return Err(ZennError::Empty("training split"));
    }
    Ok((x, y))
}

/// `½ Σ_μ ‖f(X_μ) − Y_μ‖²` over the training split.
pub fn loss<M: Regressor>(model: &M, dataset: &Dataset) -> Result<f64> {
    let (x, y) = train_view(dataset)?;
    let pred = model.predict(x.view())?;
    check_shapes(pred.view(), y.view())?;
    Ok(0.5 * pred.iter().zip(y.iter()).map(|(p, t)| (p - t) * (p - t)).sum::<f64>())
}

/// Runs exactly `config.epochs` updates `θ ← θ − η ∇L(θ)` on the training
/// split and returns the final model with its trace.
///
/// The trace logs epoch 0, every multiple of `log_interval` and the last
/// epoch. A non-finite loss aborts with [`ZennError::Diverged`].
pub fn train_gd<M: Regressor>(model: &M, dataset: &Dataset, config: &TrainConfig) -> Result<(M, TrainTrace)> {
    config.validate()?;
    let (x, y) = train_view(dataset)?;
    let (vx, vy) = dataset.subset(Split::Validation);
    let per_train = (y.len()) as f64;
    // Only read the clock when asked: some targets (wasm32) have none.
    let start = config.log_wall_time.then(Instant::now);

    let mut model = model.clone();
    let mut theta = model.params();
    let mut trace = TrainTrace::default();

    let log = |epoch: usize, train_loss: f64, m: &M, trace: &mut TrainTrace| -> Result<()> {
        let (val_mse, psnr) = if vx.nrows() > 0 {
            let pred = m.predict(vx.view())?;
            let v = mse(pred.view(), vy.view())?;
            (Some(v), config.report_psnr.then(|| psnr_from_mse(v, 1.0)))
        } else {
            (None, None)
        };
        trace.records.push(TraceRecord {
            epoch,
            train_mse: 2.0 * train_loss / per_train,
            val_mse,
            psnr,
            wall_time_s: start.map(|s| s.elapsed().as_secs_f64()),
        });
        Ok(())
    };

    for epoch in 0..config.epochs {
        let (l, mut grad) = model.loss_grad(x.view(), y.view())?;
        if !l.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(ZennError::Diverged { epoch });
        }
        if epoch % config.log_interval == 0 {
            log(epoch, l, &model, &mut trace)?;
        }
        if config.weight_decay > 0.0 {
            for (g, t) in grad.iter_mut().zip(&theta) {
                *g += config.weight_decay * t;
            }
        }
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= config.learning_rate * g;
        }
        model.set_params(&theta)?;
    }
    let final_loss = loss_on(&model, x.view(), y.view())?;
    if !final_loss.is_finite() {
        return Err(ZennError::Diverged { epoch: config.epochs });
    }
    log(config.epochs, final_loss, &model, &mut trace)?;
    Ok((model, trace))
}

fn loss_on<M: Regressor>(model: &M, x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<f64> {
    let pred = model.predict(x)?;
    Ok(0.5 * pred.iter().zip(y.iter()).map(|(p, t)| (p - t) * (p - t)).sum::<f64>())
}

/// Compares the kernel prediction of the function-space change after one
/// gradient step with the change actually produced at `probe_x`.
///
/// Returns `(−η Σ_μ K(probe_x, X_μ) E_μ, f_{θ−η∇L}(probe_x) − f_θ(probe_x))`
/// with residuals `E_μ = f(X_μ) − Y_μ` over the training split. The two agree
/// to `O(η²)`.
pub fn residual_evolution_check(model: &ShallowZeNN, dataset: &Dataset, probe_x: f64, eta: f64) -> Result<(f64, f64)> {
    let (x, y) = train_view(dataset)?;
    if x.ncols() != 1 || y.ncols() != 1 {
        return Err(ZennError::DimensionMismatch { expected: 1, got: x.ncols().max(y.ncols()) });
    }
    let mut predicted = 0.0;
    for (&xm, &ym) in x.iter().zip(y.iter()) {
        predicted -= eta * zentk_eval(model, probe_x, xm) * (model.forward(xm) - ym);
    }
    let (_, grad) = model.loss_grad(x.view(), y.view())?;
    let theta: Vec<f64> = model.params().iter().zip(&grad).map(|(t, g)| t - eta * g).collect();
    let mut stepped = model.clone();
    stepped.set_params(&theta)?;
    Ok((predicted, stepped.forward(probe_x) - model.forward(probe_x)))
}

fn check_shapes(pred: ArrayView2<f64>, truth: ArrayView2<f64>) -> Result<()> {
    if pred.dim() != truth.dim() {
        let (e, g) = if pred.nrows() != truth.nrows() {
            (truth.nrows(), pred.nrows())
        } else {
            (truth.ncols(), pred.ncols())
        };
        return Err(ZennError::DimensionMismatch { expected: e, got: g });
    }
    Ok(())
}

/// Mean squared error over all samples and components.
pub fn mse(pred: ArrayView2<f64>, truth: ArrayView2<f64>) -> Result<f64> {
    check_shapes(pred, truth)?;
    if pred.is_empty() {
        return Err(ZennError::Empty("metric input"));
    }
    Ok(pred.iter().zip(truth.iter()).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / pred.len() as f64)
}

/// Peak signal-to-noise ratio in dB; `f64::INFINITY` when the inputs agree.
pub fn psnr(pred: ArrayView2<f64>, truth: ArrayView2<f64>, max_value: f64) -> Result<f64> {
    Ok(psnr_from_mse(mse(pred, truth)?, max_value))
}

pub fn psnr_from_mse(mse: f64, max_value: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (max_value * max_value / mse).log10()
    }
}
