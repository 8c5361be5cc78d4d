use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::loss::{batch_loss, record_terms};
use super::optim::{adam_step, AdamState, PlateauScheduler};
use crate::autodiff::{Graph, Tape};
use crate::data::{GammaRecord, StandardizedComponents};
use crate::descriptors::DescriptorTable;
use crate::error::{Error, Result};
use crate::eval::{records_gd_msd, EmbeddedComponents, FD_STEP};
use crate::model::{network, Composition, DescriptorSource, GeModel, ModelCheckpoint, TrainingMetadata};

/// Keeps the shuffle stream apart from the initialization stream when both
/// use the run seed.
const SHUFFLE_SALT: u64 = 0x5_4ff1e;

pub const METRICS_HEADER: &str = "epoch,train_loss,val_loss,gd_msd_train,gd_msd_val,lr";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub gd_msd_train: f64,
    pub gd_msd_val: f64,
    /// Learning rate used during this epoch.
    pub lr: f64,
}

pub fn metrics_csv(history: &[EpochMetrics]) -> String {
    let mut s = format!("{METRICS_HEADER}\n");
    for m in history {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            m.epoch, m.train_loss, m.val_loss, m.gd_msd_train, m.gd_msd_val, m.lr
        );
    }
    s
}

#[derive(Debug, Clone)]
pub struct FitResult {
    /// Parameters with the best validation loss (epoch 0 is the initial model).
    pub model: GeModel,
    pub checkpoint: ModelCheckpoint,
    pub history: Vec<EpochMetrics>,
    pub best_epoch: usize,
    pub best_val_loss: f64,
}

pub fn descriptor_source(table: &DescriptorTable) -> DescriptorSource {
    DescriptorSource {
        kind: table.source.clone(),
        dim: table.dim(),
        seed: table.seed,
    }
}

/// Record-mean SmoothL1 of `model` over `records`.
pub fn evaluate_loss(model: &GeModel, records: &[GammaRecord], components: &StandardizedComponents, beta: f64) -> Result<f64> {
    let ev = model.evaluator();
    let embedded = EmbeddedComponents::new(&ev, components)?;
    let (mut sum, mut n) = (0.0, 0usize);
    for r in records {
        let p = ev.predict_embedded(
            embedded.get(&r.smiles_1)?,
            embedded.get(&r.smiles_2)?,
            r.temperature,
            Composition::new(r.x1),
        )?;
        let (s, k) = record_terms(&p, r, beta);
        sum += s;
        n += k;
    }
    if n == 0 {
        return Err(Error::Invalid("no ln gamma targets to evaluate".into()));
    }
    Ok(sum / n as f64)
}

/// Every `k`-th record so that at most `n` remain.
fn audit_subset(records: &[GammaRecord], n: usize) -> Vec<&GammaRecord> {
    if n == 0 {
        return Vec::new();
    }
    let stride = records.len().div_ceil(n).max(1);
    records.iter().step_by(stride).collect()
}

fn gd_msd(model: &GeModel, components: &StandardizedComponents, subsets: [&[&GammaRecord]; 2]) -> Result<[f64; 2]> {
    let ev = model.evaluator();
    let embedded = EmbeddedComponents::new(&ev, components)?;
    Ok([
        records_gd_msd(&ev, &embedded, subsets[0], FD_STEP)?,
        records_gd_msd(&ev, &embedded, subsets[1], FD_STEP)?,
    ])
}

struct Best {
    model: GeModel,
    epoch: usize,
    val_loss: f64,
}

impl Best {
    fn checkpoint(&self, seed: u64, source: &DescriptorSource, epochs_run: usize, config: &TrainConfig) -> ModelCheckpoint {
        let mut ck = ModelCheckpoint::from_model(&self.model, seed, source.clone());
        ck.training = Some(TrainingMetadata {
            epochs_run,
            best_epoch: self.epoch,
            best_val_loss: Some(self.val_loss),
            settings: config.settings(),
        });
        ck
    }
}

/// Trains `model` on `train`, selecting the parameters with the lowest
/// validation loss. Records are reshuffled every epoch from `config.seed`.
///
/// A non-finite validation loss aborts with [`Error::Diverged`] carrying the
/// best checkpoint so far; a non-finite gradient aborts with
/// [`Error::NonFiniteGradient`].
pub fn fit(
    train: &[GammaRecord],
    val: &[GammaRecord],
    model: GeModel,
    table: &DescriptorTable,
    config: &TrainConfig,
) -> Result<FitResult> {
    config.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(Error::Invalid("training and validation splits must be non-empty".into()));
    }
    if table.dim() != model.config.descriptor_dim {
        return Err(Error::Shape(format!(
            "descriptor table has dim {}, model expects {}",
            table.dim(),
            model.config.descriptor_dim
        )));
    }
    let beta = config.smoothl1_beta;
    let source = descriptor_source(table);
    let components = StandardizedComponents::new(&model.stats, table, train.iter().chain(val))?;
    let audit_train = audit_subset(train, config.gd_audit_points);
    let audit_val = audit_subset(val, config.gd_audit_points);

    let initial_val = evaluate_loss(&model, val, &components, beta)?;
    let mut best = Best {
        model: model.clone(),
        epoch: 0,
        val_loss: initial_val,
    };
    let mut current = model;
    let mut state = AdamState::new(current.params.values.len(), config.lr0);
    let mut scheduler = PlateauScheduler::new(config.lr_decay_factor, config.lr_patience);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ SHUFFLE_SALT);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = Vec::new();
    let mut since_best = 0;

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        let lr = state.lr;
        let (mut loss_sum, mut n_terms) = (0.0, 0usize);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&GammaRecord> = chunk.iter().map(|&i| &train[i]).filter(|r| r.n_targets() > 0).collect();
            if batch.is_empty() {
                continue;
            }
            let mut tape = Tape::new();
            let bound = network::bind(&mut tape, &current.params.values);
            let (loss, n) = batch_loss(&mut tape, &bound, &current, &batch, &components, beta)?;
            let grads = tape.backward(loss)?;
            loss_sum += tape.get(loss).value * n as f64;
            n_terms += n;
            adam_step(&mut current.params.values, grads.as_slice(), &mut state, config.weight_decay)?;
        }
        if n_terms == 0 {
            return Err(Error::Invalid("training split has no ln gamma targets".into()));
        }

        let val_loss = evaluate_loss(&current, val, &components, beta)?;
        if !val_loss.is_finite() {
            let last_good = best.checkpoint(config.seed, &source, epoch - 1, config);
            return Err(Error::Diverged {
                epoch,
                last_good: Box::new(last_good),
            });
        }
        let [gd_msd_train, gd_msd_val] = gd_msd(&current, &components, [&audit_train, &audit_val])?;
        let m = EpochMetrics {
            epoch,
            train_loss: loss_sum / n_terms as f64,
            val_loss,
            gd_msd_train,
            gd_msd_val,
            lr,
        };
        log::info!(
            "epoch {epoch}: train {:.6} val {:.6} gd {:.3e}/{:.3e} lr {lr:e}",
            m.train_loss,
            m.val_loss,
            gd_msd_train,
            gd_msd_val
        );
        history.push(m);

        if val_loss < best.val_loss {
            best = Best {
                model: current.clone(),
                epoch,
                val_loss,
            };
            since_best = 0;
        } else {
            since_best += 1;
        }
        state.lr = scheduler.step(val_loss, state.lr);
        if since_best >= config.early_stop_patience {
            log::info!("no validation improvement for {since_best} epochs; stopping");
            break;
        }
    }

    let checkpoint = best.checkpoint(config.seed, &source, history.len(), config);
    Ok(FitResult {
        model: best.model,
        checkpoint,
        history,
        best_epoch: best.epoch,
        best_val_loss: best.val_loss,
    })
}
