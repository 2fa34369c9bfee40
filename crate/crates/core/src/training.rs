//! RMSE training with Adam, step learning-rate decay, warm restarts and
//! gradient accumulation.
//!
//! An accumulation window is `accumulation_steps` consecutive mini-batches.
//! The gradient applied at the end of a window is the exact gradient of the
//! RMSE over every sample in the window: per-sample squared-error gradients
//! are summed, then scaled by `1 / (2 · n · RMSE)`. A window of `k` batches
//! of size `b` therefore produces the same update as one batch of `k·b`.
//!
//! Dropout masks are keyed on `(seed, epoch, position in the epoch's
//! shuffle)`, so they do not depend on how samples are grouped.

use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::EncodedDataset;
use crate::error::{Error, Result};
use crate::metrics;
use crate::mix_seed;
use crate::model::{accumulate_squared_error, predict_one, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub lr_initial: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub lr_drop_period: usize,
    pub lr_drop_factor: f64,
    /// Every this many epochs the optimizer state is reset and the best
    /// weights so far are reloaded.
    pub restart_period: usize,
    pub accumulation_steps: usize,
    pub seed: u64,
    /// Global gradient-norm cap, off by default.
    pub grad_clip: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr_initial: 1e-4,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            batch_size: 256,
            epochs: 400,
            lr_drop_period: 200,
            lr_drop_factor: 0.1,
            restart_period: 100,
            accumulation_steps: 1,
            seed: 0,
            grad_clip: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("batch_size", self.batch_size),
            ("epochs", self.epochs),
            ("lr_drop_period", self.lr_drop_period),
            ("restart_period", self.restart_period),
            ("accumulation_steps", self.accumulation_steps),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.restart_period > self.epochs {
            return Err(Error::InvalidConfig(
                "restart_period must not exceed epochs".into(),
            ));
        }
        if !(self.lr_initial > 0.0 && self.lr_drop_factor > 0.0 && self.adam_epsilon > 0.0) {
            return Err(Error::InvalidConfig(
                "learning rate, drop factor and epsilon must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return Err(Error::InvalidConfig("Adam betas must be in [0, 1)".into()));
        }
        if matches!(self.grad_clip, Some(c) if !(c > 0.0)) {
            return Err(Error::InvalidConfig("grad_clip must be positive".into()));
        }
        Ok(())
    }
}

/// `sqrt(mean((pred − target)²))`
pub fn rmse_loss(pred: &[f64], target: &[f64]) -> Result<f64> {
    metrics::mse(target, pred).map(f64::sqrt)
}

/// `lr_initial · factor^floor(epoch / period)`
pub fn schedule_lr(epoch: usize, cfg: &TrainConfig) -> f64 {
    cfg.lr_initial * cfg.lr_drop_factor.powi((epoch / cfg.lr_drop_period) as i32)
}

/// Adam moment state shaped like the model.
#[derive(Debug, Clone)]
pub struct Adam {
    m: ModelParams,
    v: ModelParams,
    step: u64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
}

impl Adam {
    pub fn new(like: &ModelParams, cfg: &TrainConfig) -> Self {
        Adam {
            m: like.zeros_like(),
            v: like.zeros_like(),
            step: 0,
            beta1: cfg.adam_beta1,
            beta2: cfg.adam_beta2,
            epsilon: cfg.adam_epsilon,
        }
    }

    pub fn reset(&mut self) {
        self.m.fill(0.0);
        self.v.fill(0.0);
        self.step = 0;
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn update(&mut self, params: &mut ModelParams, grads: &ModelParams, lr: f64) {
        self.step += 1;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.epsilon);
        let c1 = 1.0 - b1.powi(self.step as i32);
        let c2 = 1.0 - b2.powi(self.step as i32);
        let tensors = params
            .tensors_mut()
            .into_iter()
            .zip(grads.tensors())
            .zip(self.m.tensors_mut())
            .zip(self.v.tensors_mut());
        for (((p, g), m), v) in tensors {
            for i in 0..p.data.len() {
                let gi = g.data[i];
                m.data[i] = b1 * m.data[i] + (1.0 - b1) * gi;
                v.data[i] = b2 * v.data[i] + (1.0 - b2) * gi * gi;
                let m_hat = m.data[i] / c1;
                let v_hat = v.data[i] / c2;
                p.data[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_rmse: f64,
    pub val_mse: f64,
    /// NaN when the validation targets are all equal.
    pub val_ci: f64,
    pub lr: f64,
    pub restarted: bool,
    pub updates: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_mse: f64,
}

#[derive(Serialize)]
struct HistorySummary {
    best_epoch: usize,
    best_val_mse: f64,
}

impl TrainHistory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_rmse,val_mse,val_ci,lr,restarted\n");
        for r in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.epoch, r.train_rmse, r.val_mse, r.val_ci, r.lr, r.restarted
            ));
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&HistorySummary {
            best_epoch: self.best_epoch,
            best_val_mse: self.best_val_mse,
        })
        .expect("plain struct serializes")
    }

    pub fn write(&self, csv_path: impl AsRef<Path>, summary_path: impl AsRef<Path>) -> Result<()> {
        let (csv_path, summary_path) = (csv_path.as_ref(), summary_path.as_ref());
        std::fs::write(csv_path, self.to_csv()).map_err(|e| Error::file(csv_path, e))?;
        std::fs::write(summary_path, self.summary_json()).map_err(|e| Error::file(summary_path, e))?;
        Ok(())
    }
}

/// Hooks called by [`fit_with_observer`].
pub trait TrainObserver {
    fn on_epoch(&mut self, _record: &EpochRecord) -> Result<()> {
        Ok(())
    }

    /// Called with the new best weights whenever validation MSE improves.
    fn on_improved(&mut self, _epoch: usize, _params: &ModelParams) -> Result<()> {
        Ok(())
    }
}

struct Silent;
impl TrainObserver for Silent {}

/// Writes one progress line per epoch to any writer (stderr in the CLI).
pub struct ProgressLog<W: Write>(pub W);

impl<W: Write> TrainObserver for ProgressLog<W> {
    fn on_epoch(&mut self, r: &EpochRecord) -> Result<()> {
        writeln!(
            self.0,
            "epoch {:>4}  train_rmse {:.5}  val_mse {:.5}  val_ci {:.4}  lr {:.1e}{}",
            r.epoch,
            r.train_rmse,
            r.val_mse,
            r.val_ci,
            r.lr,
            if r.restarted { "  (restart)" } else { "" }
        )?;
        Ok(())
    }
}

pub struct FitOutcome {
    pub best: ModelParams,
    pub history: TrainHistory,
    /// Weights after the last epoch.
    pub last: ModelParams,
}

pub fn fit(
    params: ModelParams,
    data: &EncodedDataset,
    train: &[usize],
    val: &[usize],
    cfg: &TrainConfig,
) -> Result<FitOutcome> {
    fit_with_observer(params, data, train, val, cfg, &mut Silent)
}

fn clip_global_norm(grads: &mut ModelParams, max_norm: f64) {
    let norm = grads.l2_norm();
    if norm > max_norm {
        grads.scale(max_norm / norm);
    }
}

pub fn fit_with_observer(
    mut params: ModelParams,
    data: &EncodedDataset,
    train: &[usize],
    val: &[usize],
    cfg: &TrainConfig,
    observer: &mut dyn TrainObserver,
) -> Result<FitOutcome> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::EmptySplit("training"));
    }
    if val.is_empty() {
        return Err(Error::EmptySplit("validation"));
    }
    let val_targets = data.targets(val);
    let mut adam = Adam::new(&params, cfg);
    let mut grads = params.zeros_like();
    let mut best: Option<ModelParams> = None;
    let mut history = TrainHistory {
        best_val_mse: f64::INFINITY,
        ..TrainHistory::default()
    };

    for epoch in 0..cfg.epochs {
        let restarted = epoch > 0 && epoch % cfg.restart_period == 0;
        if restarted {
            if let Some(b) = &best {
                params.clone_from(b);
            }
            adam.reset();
        }
        let lr = schedule_lr(epoch, cfg);
        let epoch_seed = mix_seed(cfg.seed, epoch as u64);
        let mut order = train.to_vec();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(epoch_seed));

        let window_len = cfg.batch_size * cfg.accumulation_steps;
        let mut epoch_sse = 0.0;
        let mut updates = 0;
        for (w, window) in order.chunks(window_len).enumerate() {
            grads.fill(0.0);
            let mut window_sse = 0.0;
            for (b, batch) in window.chunks(cfg.batch_size).enumerate() {
                let batch_index = w * cfg.accumulation_steps + b;
                let mut batch_sse = 0.0;
                for (j, &rec) in batch.iter().enumerate() {
                    let position = w * window_len + b * cfg.batch_size + j;
                    batch_sse += accumulate_squared_error(
                        &params,
                        data.drug_tokens(rec),
                        data.protein_tokens(rec),
                        data.affinity(rec),
                        Some(mix_seed(epoch_seed, position as u64)),
                        &mut grads,
                    )?;
                }
                if !batch_sse.is_finite() {
                    return Err(Error::NonFiniteLoss {
                        epoch,
                        batch: batch_index,
                    });
                }
                window_sse += batch_sse;
            }
            let rmse = (window_sse / window.len() as f64).sqrt();
            if rmse > 0.0 {
                grads.scale(1.0 / (2.0 * window.len() as f64 * rmse));
            } else {
                grads.fill(0.0);
            }
            if let Some(max_norm) = cfg.grad_clip {
                clip_global_norm(&mut grads, max_norm);
            }
            adam.update(&mut params, &grads, lr);
            updates += 1;
            epoch_sse += window_sse;
        }
        let train_rmse = (epoch_sse / train.len() as f64).sqrt();

        let val_pred = predict(&params, data, val)?;
        let val_mse = metrics::mse(&val_targets, &val_pred)?;
        let val_ci = metrics::concordance_index(&val_targets, &val_pred).unwrap_or(f64::NAN);
        if !val_mse.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, batch: updates });
        }
        let record = EpochRecord {
            epoch,
            train_rmse,
            val_mse,
            val_ci,
            lr,
            restarted,
            updates,
        };
        observer.on_epoch(&record)?;
        history.epochs.push(record);
        if val_mse < history.best_val_mse {
            history.best_val_mse = val_mse;
            history.best_epoch = epoch;
            observer.on_improved(epoch, &params)?;
            match &mut best {
                Some(b) => b.clone_from(&params),
                None => best = Some(params.clone()),
            }
        }
    }
    Ok(FitOutcome {
        best: best.expect("at least one epoch ran"),
        history,
        last: params,
    })
}

/// Inference over dataset records, dropout off.
pub fn predict(params: &ModelParams, data: &EncodedDataset, records: &[usize]) -> Result<Vec<f64>> {
    records
        .iter()
        .map(|&r| predict_one(params, data.drug_tokens(r), data.protein_tokens(r)))
        .collect()
}
