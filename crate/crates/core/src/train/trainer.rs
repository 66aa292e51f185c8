//! Mini-batch Adam training with early stopping and best-epoch restore.
//!
//! Batches run example by example: each example's score gradient is scaled
//! by the batch length before the backward pass, so the accumulated
//! parameter gradients equal those of a batched mean loss. Every source of
//! randomness (shuffling, dropout) draws from streams derived from the
//! training seed, which makes whole runs reproducible bit for bit.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arch::{run_backward, run_forward, Mode, Model};
use crate::corpus::{multi_hot, Dataset};
use crate::ensemble::{instance_recall, mean_recall, top_k_indices};
use crate::error::{Error, Result};
use crate::nn::adam::{AdamConfig, AdamState};
use crate::nn::loss::bce_loss;
use crate::nn::params::ParameterStore;
use crate::nn::rng::RngStream;
use crate::nn::tensor::Tensor;
use crate::scalar::Scalar;
use crate::text::{encode, tokenize, Cleaner, Vocabulary};

use crate::arch::ModelConfig;

pub const N_RECOMMENDED: usize = 6;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Stop after this many consecutive epochs without a strict
    /// improvement of the validation recall.
    pub patience: usize,
    pub lr: f64,
    /// Fraction of the data that trains when the caller splits by ratio.
    pub split_ratio: f64,
    pub seed: u64,
    pub shuffle_each_epoch: bool,
}

impl TrainConfig {
    pub fn defaults(seed: u64) -> TrainConfig {
        TrainConfig {
            batch_size: 64,
            max_epochs: 30,
            patience: 3,
            lr: 0.001,
            split_ratio: 0.8,
            seed,
            shuffle_each_epoch: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        if self.max_epochs == 0 {
            return Err(Error::Config("max_epochs must be positive".into()));
        }
        if self.patience == 0 {
            return Err(Error::Config("patience must be positive".into()));
        }
        if !(self.lr.is_finite() && self.lr >= 0.0) {
            return Err(Error::Config(format!("learning rate {} is invalid", self.lr)));
        }
        if !(0.0 < self.split_ratio && self.split_ratio < 1.0) {
            return Err(Error::Config(format!(
                "split ratio {} must lie strictly between 0 and 1",
                self.split_ratio
            )));
        }
        Ok(())
    }
}

/// One instance, cleaned, tokenized and encoded for a fixed model shape.
#[derive(Debug, Clone)]
pub struct EncodedExample<S: Scalar> {
    pub idx: u64,
    pub text: Vec<u32>,
    pub reply: Vec<u32>,
    /// Multi-hot target vector over the category inventory.
    pub targets: Tensor<S>,
    /// Gold category indices, ascending.
    pub gold: Vec<usize>,
}

/// Clean, tokenize and pad one text/reply pair.
pub fn encode_pair(
    cleaner: &Cleaner,
    vocab: &Vocabulary,
    text: &str,
    reply: &str,
    len_text: usize,
    len_reply: usize,
) -> (Vec<u32>, Vec<u32>) {
    let t = encode(&tokenize(&cleaner.clean(text)), vocab, len_text);
    let r = encode(&tokenize(&cleaner.clean(reply)), vocab, len_reply);
    (t, r)
}

/// Encode a whole dataset against a vocabulary and model shape.
pub fn encode_dataset<S: Scalar>(
    dataset: &Dataset,
    cleaner: &Cleaner,
    vocab: &Vocabulary,
    config: &ModelConfig,
) -> Vec<EncodedExample<S>> {
    dataset
        .instances
        .iter()
        .map(|inst| {
            let (text, reply) = encode_pair(
                cleaner,
                vocab,
                &inst.text,
                &inst.reply,
                config.len_text,
                config.len_reply,
            );
            EncodedExample {
                idx: inst.idx,
                text,
                reply,
                targets: Tensor::vector(multi_hot(&inst.labels, config.n_outputs)),
                gold: inst.labels.clone(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub mean_train_loss: f64,
    pub val_recall: f64,
    /// SHA-256 over the epoch-end parameters; lets two runs be compared
    /// for bitwise equality without shipping checkpoints around.
    pub param_digest: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    /// Earliest epoch attaining the best validation recall; the model is
    /// restored to this epoch's parameters when training returns.
    pub best_epoch: usize,
    pub best_val_recall: f64,
    pub stopped_early: bool,
}

/// SHA-256 hex digest over every parameter (name, shape and little-endian
/// values) in sorted name order.
pub fn param_digest<S: Scalar>(store: &ParameterStore<S>) -> String {
    let mut hasher = Sha256::new();
    for (name, tensor) in store.iter() {
        hasher.update(name.as_bytes());
        hasher.update([0u8]);
        for &dim in tensor.shape() {
            hasher.update((dim as u64).to_le_bytes());
        }
        let mut bytes = Vec::with_capacity(tensor.len() * S::WIDTH as usize);
        for &v in tensor.data() {
            v.write_le(&mut bytes);
        }
        hasher.update(&bytes);
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Mean recall@6 of the model over a labeled set, using deterministic
/// inference.
pub fn validation_recall<S: Scalar>(model: &Model<S>, set: &[EncodedExample<S>]) -> Result<f64> {
    let mut recalls = Vec::with_capacity(set.len());
    for ex in set {
        let scores = model.infer(&ex.text, &ex.reply)?;
        let top = top_k_indices(scores.data(), N_RECOMMENDED);
        recalls.push(instance_recall(&top, &ex.gold));
    }
    mean_recall(recalls).ok_or_else(|| Error::Config("validation set is empty".into()))
}

/// Train `model` in place. Returns the per-epoch report; the model holds
/// the parameters of the best epoch, not the last one.
pub fn train<S: Scalar>(
    model: &mut Model<S>,
    train_set: &[EncodedExample<S>],
    val_set: &[EncodedExample<S>],
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::Config("training set is empty".into()));
    }
    if val_set.is_empty() {
        return Err(Error::Config("validation set is empty".into()));
    }
    for ex in train_set.iter().chain(val_set) {
        if ex.targets.len() != model.config.n_outputs {
            return Err(Error::Shape {
                expected: format!("targets of length {}", model.config.n_outputs),
                got: format!("length {} (instance {})", ex.targets.len(), ex.idx),
            });
        }
    }

    let base = RngStream::new(config.seed);
    let mut adam = AdamState::new(AdamConfig::with_lr(config.lr));
    let mut order: Vec<usize> = (0..train_set.len()).collect();

    let mut records = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    let mut best_params = None;
    let mut since_improve = 0usize;
    let mut stopped_early = false;

    for epoch in 1..=config.max_epochs {
        if config.shuffle_each_epoch || epoch == 1 {
            let mut shuffler = base.derive(&format!("shuffle.epoch{epoch}"));
            shuffler.shuffle(&mut order);
        }
        let mut dropout_rng = base.derive(&format!("dropout.epoch{epoch}"));

        let mut loss_sum = 0.0f64;
        for (batch_idx, batch) in order.chunks(config.batch_size).enumerate() {
            model.params.zero_grads();
            let inv_batch = S::from_f64(1.0 / batch.len() as f64);
            let mut batch_loss = 0.0f64;
            for &i in batch {
                let ex = &train_set[i];
                let pass = run_forward(
                    &model.config,
                    &model.params,
                    &ex.text,
                    &ex.reply,
                    Mode::Train,
                    &mut dropout_rng,
                )?;
                let (loss, mut dscores) = bce_loss(&pass.scores, &ex.targets)?;
                batch_loss += loss.to_f64();
                dscores.scale(inv_batch);
                run_backward(&model.config, &mut model.params, &pass, &dscores);
            }
            if !batch_loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite loss in epoch {epoch}, batch {batch_idx}"
                )));
            }
            loss_sum += batch_loss;
            adam.step(&mut model.params);
        }

        let val = validation_recall(model, val_set)?;
        let improved = best.map_or(true, |(_, b)| val > b);
        if improved {
            best = Some((epoch, val));
            best_params = Some(model.params.values_cloned());
            since_improve = 0;
        } else {
            since_improve += 1;
        }
        records.push(EpochRecord {
            epoch,
            mean_train_loss: loss_sum / train_set.len() as f64,
            val_recall: val,
            param_digest: param_digest(&model.params),
        });
        if since_improve >= config.patience {
            stopped_early = true;
            break;
        }
    }

    let (best_epoch, best_val_recall) = best.expect("at least one epoch ran");
    model
        .params
        .restore_values(&best_params.expect("snapshot taken with best"));

    Ok(TrainReport {
        epochs: records,
        best_epoch,
        best_val_recall,
        stopped_early,
    })
}
