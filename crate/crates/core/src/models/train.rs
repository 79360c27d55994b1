//! Minibatch Adagrad training with best-validation-F1 model selection.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::classifier::{Architecture, Classifier, ModelKind};
use super::data::LabeledQuery;
use super::metrics::Metrics;
use crate::error::{Error, Result};
use crate::nnet::{AdagradState, LOG_CLAMP};
use crate::textnorm::{normalize, NormConfig, NormalizedQuery};
use crate::vocab_embed::{build_vocab, DEFAULT_BUCKETS};

pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
    pub maxlen: usize,
    pub embed_dim: usize,
    pub buckets: usize,
    pub filter_count: usize,
    pub filter_width: usize,
    pub pool_width: usize,
    pub pool_stride: usize,
    pub hidden: usize,
    /// Epochs without validation-F1 improvement before stopping.
    pub patience: usize,
    /// Tokens rarer than this in the training set fall back to trigram hashing.
    pub min_count: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            lr: 0.001,
            epochs: 30,
            seed: 42,
            maxlen: 15,
            embed_dim: 32,
            buckets: DEFAULT_BUCKETS,
            filter_count: 16,
            filter_width: 3,
            pool_width: 2,
            pool_stride: 2,
            hidden: 16,
            patience: 5,
            min_count: 2,
        }
    }
}

impl TrainConfig {
    /// Full-size network: 300-d embeddings, 128 filters,
    /// 32 LSTM cells, batches of 1024.
    pub fn full_scale() -> Self {
        TrainConfig {
            batch_size: 1024,
            embed_dim: 300,
            filter_count: 128,
            hidden: 32,
            ..Self::default()
        }
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            maxlen: self.maxlen,
            embed_dim: self.embed_dim,
            buckets: self.buckets,
            filter_count: self.filter_count,
            filter_width: self.filter_width,
            pool_width: self.pool_width,
            pool_stride: self.pool_stride,
            hidden: self.hidden,
        }
    }

    pub fn validate(&self, kind: ModelKind) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::InvalidConfig("lr must be positive".into()));
        }
        self.architecture().validate(kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_precision: f64,
    pub val_recall: f64,
    pub val_f1: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub kind: ModelKind,
    pub history: Vec<EpochRecord>,
    /// 1-based epoch whose parameters were kept.
    pub best_epoch: usize,
    pub best_val_f1: f64,
}

fn normalized(data: &[LabeledQuery], norm: &NormConfig) -> Vec<NormalizedQuery> {
    data.iter().map(|q| normalize(&q.text, norm)).collect()
}

/// Metrics of the help class over already-normalized queries.
pub fn evaluate_normalized(model: &Classifier, data: &[(NormalizedQuery, bool)]) -> Result<Metrics> {
    Ok(scored(model, data)?.0)
}

/// Metrics plus mean cross-entropy.
fn scored(model: &Classifier, data: &[(NormalizedQuery, bool)]) -> Result<(Metrics, f64)> {
    let mut pairs = Vec::with_capacity(data.len());
    let mut loss = 0.0;
    for (nq, gold) in data {
        let p = model.predict_normalized(nq)?;
        let p_gold = if *gold { p } else { 1.0 - p };
        loss -= p_gold.max(LOG_CLAMP).ln();
        pairs.push((p >= DECISION_THRESHOLD, *gold));
    }
    Ok((Metrics::from_predictions(pairs), loss / data.len().max(1) as f64))
}

/// Precision, recall and F1 of the help class on `data`.
pub fn evaluate(model: &Classifier, data: &[LabeledQuery], norm: &NormConfig) -> Result<Metrics> {
    if data.is_empty() {
        return Err(Error::Dataset("evaluation set is empty".into()));
    }
    let norm = norm.clone().with_maxlen(model.arch.maxlen)?;
    let prepared: Vec<(NormalizedQuery, bool)> = data
        .iter()
        .map(|q| (normalize(&q.text, &norm), q.label.is_help()))
        .collect();
    evaluate_normalized(model, &prepared)
}

/// Trains `kind` on `train`, selecting the epoch with the best F1 on `val`
/// (or on `train` when `val` is empty).
pub fn train(
    train: &[LabeledQuery],
    val: &[LabeledQuery],
    kind: ModelKind,
    cfg: &TrainConfig,
    norm: &NormConfig,
) -> Result<(Classifier, TrainReport)> {
    cfg.validate(kind)?;
    let helps = train.iter().filter(|q| q.label.is_help()).count();
    if train.is_empty() || helps == 0 || helps == train.len() {
        return Err(Error::DegenerateLabels);
    }
    let norm = norm.clone().with_maxlen(cfg.maxlen)?;
    let train_nq = normalized(train, &norm);
    let vocab = build_vocab(&train_nq, cfg.min_count)?;
    let mut model = Classifier::new(kind, cfg.architecture(), vocab, cfg.seed)?;

    let samples: Vec<(Vec<String>, usize)> = train_nq
        .iter()
        .zip(train)
        .map(|(nq, q)| (nq.tokens.clone(), q.label.class()))
        .collect();
    let selection: Vec<(NormalizedQuery, bool)> = if val.is_empty() {
        train_nq.into_iter().zip(train).map(|(nq, q)| (nq, q.label.is_help())).collect()
    } else {
        normalized(val, &norm)
            .into_iter()
            .zip(val)
            .map(|(nq, q)| (nq, q.label.is_help()))
            .collect()
    };

    let mut optimizer = AdagradState::new(model.params.tensors(), cfg.lr);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut history = Vec::new();
    let mut best: Option<(usize, f64, f64, Classifier)> = None;
    let mut since_best = 0;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch_idx in order.chunks(cfg.batch_size) {
            let batch: Vec<(Vec<String>, usize)> = batch_idx.iter().map(|&i| samples[i].clone()).collect();
            let (loss, grads) = model.loss_and_gradients(&batch)?;
            loss_sum += loss * batch.len() as f64;
            let grad_refs = grads.tensors();
            optimizer.update(&mut model.params.tensors_mut(), &grad_refs)?;
        }
        if !model.params.is_finite() {
            return Err(Error::InvalidConfig(format!("training diverged at epoch {epoch}")));
        }
        let (val_metrics, val_loss) = scored(&model, &selection)?;
        history.push(EpochRecord {
            epoch,
            train_loss: loss_sum / samples.len() as f64,
            val_precision: val_metrics.precision,
            val_recall: val_metrics.recall,
            val_f1: val_metrics.f1,
            val_loss,
        });
        // F1 ties are broken by validation loss.
        let improved = best.as_ref().is_none_or(|(_, f1, loss, _)| {
            val_metrics.f1 > *f1 || (val_metrics.f1 == *f1 && val_loss < *loss)
        });
        if improved {
            best = Some((epoch, val_metrics.f1, val_loss, model.clone()));
            since_best = 0;
        } else {
            since_best += 1;
            if cfg.patience > 0 && since_best >= cfg.patience {
                break;
            }
        }
    }

    let (best_epoch, best_val_f1, _, best_model) = best.expect("at least one epoch ran");
    Ok((
        best_model,
        TrainReport {
            kind,
            history,
            best_epoch,
            best_val_f1,
        },
    ))
}
