//! The four classifier variants sharing one embedding front end.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nnet::conv::pooled_len;
use crate::nnet::{
    bilstm_backward, bilstm_forward, cross_entropy, softmax, softmax_xent_grad, BiLstmCache, Conv1d, ConvCache,
    Dense, LstmCell, StepCache, Tensor,
};
use crate::textnorm::{normalize, NormConfig, NormalizedQuery};
use crate::vocab_embed::{embed_backward, embed_tokens, query_vector, EmbeddingTable, TokenSource, Vocabulary};

pub const NUM_CLASSES: usize = 2;
pub const HELP_CLASS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "CNN")]
    Cnn,
    #[serde(rename = "LSTM")]
    Lstm,
    #[serde(rename = "BiLSTM")]
    BiLstm,
    #[serde(rename = "C-BiLSTM")]
    CBiLstm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Cnn, ModelKind::Lstm, ModelKind::BiLstm, ModelKind::CBiLstm];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Cnn => "CNN",
            ModelKind::Lstm => "LSTM",
            ModelKind::BiLstm => "BiLSTM",
            ModelKind::CBiLstm => "C-BiLSTM",
        }
    }

    pub fn has_conv(self) -> bool {
        matches!(self, ModelKind::Cnn | ModelKind::CBiLstm)
    }

    pub fn has_backward_lstm(self) -> bool {
        matches!(self, ModelKind::BiLstm | ModelKind::CBiLstm)
    }

    pub fn has_lstm(self) -> bool {
        self != ModelKind::Cnn
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_lowercase();
        match key.as_str() {
            "cnn" => Ok(ModelKind::Cnn),
            "lstm" => Ok(ModelKind::Lstm),
            "bilstm" => Ok(ModelKind::BiLstm),
            "cbilstm" => Ok(ModelKind::CBiLstm),
            _ => Err(Error::InvalidConfig(format!("unknown model kind {s:?}"))),
        }
    }
}

/// Architecture hyper-parameters stored with every checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    pub maxlen: usize,
    pub embed_dim: usize,
    pub buckets: usize,
    pub filter_count: usize,
    pub filter_width: usize,
    pub pool_width: usize,
    pub pool_stride: usize,
    pub hidden: usize,
}

impl Architecture {
    pub fn validate(&self, kind: ModelKind) -> Result<()> {
        let positive = [
            ("maxlen", self.maxlen),
            ("embed_dim", self.embed_dim),
            ("buckets", self.buckets),
            ("hidden", self.hidden),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if kind.has_conv() {
            if self.filter_count == 0 || self.filter_width == 0 || self.pool_width == 0 || self.pool_stride == 0 {
                return Err(Error::InvalidConfig("conv parameters must be positive".into()));
            }
            if self.filter_width > self.maxlen {
                return Err(Error::FilterTooLong {
                    filter: self.filter_width,
                    sequence: self.maxlen,
                });
            }
            if self.pooled_len().is_none() {
                return Err(Error::InvalidConfig("pooling window longer than convolved sequence".into()));
            }
        }
        Ok(())
    }

    pub fn pooled_len(&self) -> Option<usize> {
        pooled_len(self.maxlen, self.filter_width, self.pool_width, self.pool_stride)
    }
}

/// Every trainable tensor of a classifier. Also used as the gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub embedding: EmbeddingTable,
    pub conv: Option<Conv1d>,
    pub lstm_fwd: Option<LstmCell>,
    pub lstm_bwd: Option<LstmCell>,
    pub dense: Dense,
}

impl Params {
    pub fn init(kind: ModelKind, arch: &Architecture, vocab_size: usize, seed: u64) -> Self {
        let embedding = EmbeddingTable::new(vocab_size, arch.embed_dim, arch.buckets, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let conv = kind.has_conv().then(|| {
            Conv1d::new(
                arch.filter_count,
                arch.embed_dim,
                arch.filter_width,
                arch.pool_width,
                arch.pool_stride,
                &mut rng,
            )
        });
        let rnn_in = if kind.has_conv() { arch.filter_count } else { arch.embed_dim };
        let lstm_fwd = kind.has_lstm().then(|| LstmCell::new(rnn_in, arch.hidden, &mut rng));
        let lstm_bwd = kind.has_backward_lstm().then(|| LstmCell::new(rnn_in, arch.hidden, &mut rng));
        let dense_in = match kind {
            ModelKind::Cnn => arch.filter_count * arch.pooled_len().unwrap_or(0),
            ModelKind::Lstm => arch.hidden,
            ModelKind::BiLstm | ModelKind::CBiLstm => 2 * arch.hidden,
        };
        let dense = Dense::new(dense_in, NUM_CLASSES, &mut rng);
        Params {
            embedding,
            conv,
            lstm_fwd,
            lstm_bwd,
            dense,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Params {
            embedding: self.embedding.zeros_like(),
            conv: self.conv.as_ref().map(Conv1d::zeros_like),
            lstm_fwd: self.lstm_fwd.as_ref().map(LstmCell::zeros_like),
            lstm_bwd: self.lstm_bwd.as_ref().map(LstmCell::zeros_like),
            dense: self.dense.zeros_like(),
        }
    }

    /// Named tensors in a fixed order (the checkpoint order).
    pub fn named(&self) -> Vec<(&'static str, &Tensor)> {
        let mut out = vec![
            ("embedding.words", &self.embedding.word_vectors),
            ("embedding.trigrams", &self.embedding.trigram_vectors),
        ];
        if let Some(c) = &self.conv {
            out.push(("conv.filters", &c.filters));
            out.push(("conv.bias", &c.bias));
        }
        if let Some(l) = &self.lstm_fwd {
            out.extend([("lstm_fwd.w", &l.w), ("lstm_fwd.u", &l.u), ("lstm_fwd.b", &l.b)]);
        }
        if let Some(l) = &self.lstm_bwd {
            out.extend([("lstm_bwd.w", &l.w), ("lstm_bwd.u", &l.u), ("lstm_bwd.b", &l.b)]);
        }
        out.push(("dense.w", &self.dense.w));
        out.push(("dense.b", &self.dense.b));
        out
    }

    /// Mutable tensors in the same order as [`Params::named`].
    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = vec![&mut self.embedding.word_vectors, &mut self.embedding.trigram_vectors];
        if let Some(c) = &mut self.conv {
            out.push(&mut c.filters);
            out.push(&mut c.bias);
        }
        if let Some(l) = &mut self.lstm_fwd {
            out.extend([&mut l.w, &mut l.u, &mut l.b]);
        }
        if let Some(l) = &mut self.lstm_bwd {
            out.extend([&mut l.w, &mut l.u, &mut l.b]);
        }
        out.push(&mut self.dense.w);
        out.push(&mut self.dense.b);
        out
    }

    pub fn tensors(&self) -> Vec<&Tensor> {
        self.named().into_iter().map(|(_, t)| t).collect()
    }

    pub fn add_assign(&mut self, other: &Params) -> Result<()> {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            a.add_assign(b)?;
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.scale(factor);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.is_finite())
    }
}

#[derive(Debug, Clone)]
enum Recurrent {
    None,
    Uni(Vec<StepCache>),
    Bi(BiLstmCache),
}

/// Everything one forward pass needs kept for its backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    sources: Vec<TokenSource>,
    conv: Option<ConvCache>,
    conv_shape: Option<[usize; 2]>,
    recurrent: Recurrent,
    features: Vec<f64>,
    pub probs: Vec<f64>,
}

/// A trained (or freshly initialized) help-query classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub kind: ModelKind,
    pub arch: Architecture,
    pub vocab: Vocabulary,
    pub params: Params,
}

fn columns(seq: &Tensor) -> Vec<Vec<f64>> {
    (0..seq.cols()).map(|c| seq.column(c)).collect()
}

impl Classifier {
    pub fn new(kind: ModelKind, arch: Architecture, vocab: Vocabulary, seed: u64) -> Result<Self> {
        arch.validate(kind)?;
        let params = Params::init(kind, &arch, vocab.len(), seed);
        Ok(Classifier {
            kind,
            arch,
            vocab,
            params,
        })
    }

    /// Class probabilities for a normalized token sequence, with caches.
    pub fn forward<S: AsRef<str>>(&self, tokens: &[S]) -> Result<ForwardCache> {
        if tokens.len() != self.arch.maxlen {
            return Err(Error::DimensionMismatch {
                expected: self.arch.maxlen,
                found: tokens.len(),
            });
        }
        let p = &self.params;
        let (q, sources) = embed_tokens(tokens, &self.vocab, &p.embedding);

        let (seq, conv, conv_shape) = match &p.conv {
            Some(layer) => {
                let (pooled, cache) = layer.forward(&q)?;
                let shape = [pooled.shape()[0], pooled.shape()[1]];
                (pooled, Some(cache), Some(shape))
            }
            None => (q, None, None),
        };

        let (features, recurrent) = match (self.kind, &p.lstm_fwd, &p.lstm_bwd) {
            (ModelKind::Cnn, _, _) => (seq.into_data(), Recurrent::None),
            (ModelKind::Lstm, Some(fwd), _) => {
                let cols = columns(&seq);
                let (h, caches) = fwd.run(cols.iter().map(Vec::as_slice));
                (h, Recurrent::Uni(caches))
            }
            (ModelKind::BiLstm | ModelKind::CBiLstm, Some(fwd), Some(bwd)) => {
                let (h, cache) = bilstm_forward(&seq, fwd, bwd)?;
                (h, Recurrent::Bi(cache))
            }
            _ => return Err(Error::MissingCache("recurrent parameters missing for model kind")),
        };

        let probs = softmax(&p.dense.logits(&features));
        Ok(ForwardCache {
            sources,
            conv,
            conv_shape,
            recurrent,
            features,
            probs,
        })
    }

    /// Backprop of `loss_scale · CE(probs, class)` into `grads`.
    pub fn backward(&self, cache: &ForwardCache, class: usize, loss_scale: f64, grads: &mut Params) -> Result<()> {
        let mut d_logits = softmax_xent_grad(&cache.probs, class);
        d_logits.iter_mut().for_each(|g| *g *= loss_scale);
        self.backward_from_logits(cache, &d_logits, grads)
    }

    /// Backprop of an arbitrary gradient on the logits.
    pub fn backward_from_logits(&self, cache: &ForwardCache, d_logits: &[f64], grads: &mut Params) -> Result<()> {
        let p = &self.params;
        let d_features = p.dense.backward(&cache.features, d_logits, &mut grads.dense);

        let d_seq = match (&cache.recurrent, self.kind) {
            (Recurrent::None, ModelKind::Cnn) => {
                let shape = cache.conv_shape.ok_or(Error::MissingCache("conv output shape"))?;
                Tensor::from_vec(&shape, d_features)?
            }
            (Recurrent::Uni(steps), ModelKind::Lstm) => {
                let fwd = p.lstm_fwd.as_ref().ok_or(Error::MissingCache("forward LSTM"))?;
                let g = grads.lstm_fwd.as_mut().ok_or(Error::MissingCache("forward LSTM gradient"))?;
                let dxs = fwd.backward(steps, &d_features, g);
                let rows = fwd.in_dim();
                let len = dxs.len();
                let mut d = Tensor::zeros(&[rows, len]);
                for (t, dx) in dxs.iter().enumerate() {
                    for (r, v) in dx.iter().enumerate() {
                        d.data_mut()[r * len + t] = *v;
                    }
                }
                d
            }
            (Recurrent::Bi(bi), ModelKind::BiLstm | ModelKind::CBiLstm) => {
                let fwd = p.lstm_fwd.as_ref().ok_or(Error::MissingCache("forward LSTM"))?;
                let bwd = p.lstm_bwd.as_ref().ok_or(Error::MissingCache("backward LSTM"))?;
                let (gf, gb) = match (&mut grads.lstm_fwd, &mut grads.lstm_bwd) {
                    (Some(gf), Some(gb)) => (gf, gb),
                    _ => return Err(Error::MissingCache("LSTM gradients")),
                };
                bilstm_backward(bi, &d_features, fwd, bwd, gf, gb)
            }
            _ => return Err(Error::MissingCache("recurrent cache does not match model kind")),
        };

        let d_q = match (&p.conv, &cache.conv) {
            (Some(layer), Some(conv_cache)) => {
                let g = grads.conv.as_mut().ok_or(Error::MissingCache("conv gradient"))?;
                layer.backward(conv_cache, &d_seq, g)?
            }
            (None, None) => d_seq,
            _ => return Err(Error::MissingCache("conv cache")),
        };
        embed_backward(&d_q, &cache.sources, &mut grads.embedding);
        Ok(())
    }

    /// Mean cross-entropy over `(tokens, class)` samples.
    pub fn loss(&self, samples: &[(Vec<String>, usize)]) -> Result<f64> {
        let mut total = 0.0;
        for (tokens, class) in samples {
            total += cross_entropy(&self.forward(tokens)?.probs, *class);
        }
        Ok(total / samples.len().max(1) as f64)
    }

    /// Mean loss and its gradient over `samples`.
    pub fn loss_and_gradients(&self, samples: &[(Vec<String>, usize)]) -> Result<(f64, Params)> {
        let mut grads = self.params.zeros_like();
        let scale = 1.0 / samples.len().max(1) as f64;
        let mut total = 0.0;
        for (tokens, class) in samples {
            let cache = self.forward(tokens)?;
            total += cross_entropy(&cache.probs, *class);
            self.backward(&cache, *class, scale, &mut grads)?;
        }
        Ok((total * scale, grads))
    }

    /// Help-class probability of a normalized query.
    pub fn predict_normalized(&self, nq: &NormalizedQuery) -> Result<f64> {
        Ok(self.forward(&nq.tokens)?.probs[HELP_CLASS])
    }

    /// Help-class probability of raw text: normalize, embed, classify.
    pub fn predict(&self, raw: &str, norm: &NormConfig) -> Result<f64> {
        let nq = self.normalize(raw, norm)?;
        self.predict_normalized(&nq)
    }

    /// Normalizes with this model's `maxlen`.
    pub fn normalize(&self, raw: &str, norm: &NormConfig) -> Result<NormalizedQuery> {
        if norm.maxlen == self.arch.maxlen {
            Ok(normalize(raw, norm))
        } else {
            Ok(normalize(raw, &norm.clone().with_maxlen(self.arch.maxlen)?))
        }
    }

    /// Unit sentence vector from this model's embedding table.
    pub fn sentence_vector(&self, nq: &NormalizedQuery) -> Vec<f64> {
        query_vector(nq, &self.vocab, &self.params.embedding)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab_embed::build_vocab;

    fn tiny_arch() -> Architecture {
        Architecture {
            maxlen: 6,
            embed_dim: 4,
            buckets: 8,
            filter_count: 3,
            filter_width: 2,
            pool_width: 2,
            pool_stride: 2,
            hidden: 3,
        }
    }

    fn nq(tokens: &[&str]) -> NormalizedQuery {
        let mut t = vec!["unk".to_string(); 6 - tokens.len()];
        t.extend(tokens.iter().map(|s| s.to_string()));
        NormalizedQuery {
            tokens: t,
            original: String::new(),
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert_eq!("c_bilstm".parse::<ModelKind>().unwrap(), ModelKind::CBiLstm);
        assert!("svm".parse::<ModelKind>().is_err());
    }

    #[test]
    fn every_kind_outputs_a_distribution() {
        let vocab = build_vocab(&[nq(&["how", "set", "alarm"])], 1).unwrap();
        for kind in ModelKind::ALL {
            let m = Classifier::new(kind, tiny_arch(), vocab.clone(), 3).unwrap();
            let c = m.forward(&nq(&["how", "set", "alrm"]).tokens).unwrap();
            assert!((c.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(c.probs.iter().all(|&p| p > 0.0 && p < 1.0));
        }
    }

    #[test]
    fn cnn_has_no_recurrent_params() {
        let vocab = build_vocab(&[nq(&["a"])], 1).unwrap();
        let m = Classifier::new(ModelKind::Cnn, tiny_arch(), vocab, 1).unwrap();
        let names: Vec<_> = m.params.named().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, ["embedding.words", "embedding.trigrams", "conv.filters", "conv.bias", "dense.w", "dense.b"]);
    }

    #[test]
    fn zero_seed_gives_zero_gradients() {
        let vocab = build_vocab(&[nq(&["how", "set"])], 1).unwrap();
        let m = Classifier::new(ModelKind::CBiLstm, tiny_arch(), vocab, 5).unwrap();
        let cache = m.forward(&nq(&["how", "set"]).tokens).unwrap();
        let mut g = m.params.zeros_like();
        m.backward_from_logits(&cache, &[0.0, 0.0], &mut g).unwrap();
        assert!(g.tensors().iter().all(|t| t.max_abs() == 0.0));
    }

    #[test]
    fn doubled_loss_doubles_gradients() {
        let vocab = build_vocab(&[nq(&["how", "set"])], 1).unwrap();
        let m = Classifier::new(ModelKind::CBiLstm, tiny_arch(), vocab, 5).unwrap();
        let cache = m.forward(&nq(&["how", "set", "zzz"]).tokens).unwrap();
        let mut once = m.params.zeros_like();
        m.backward(&cache, 1, 1.0, &mut once).unwrap();
        let mut twice = m.params.zeros_like();
        m.backward(&cache, 1, 1.0, &mut twice).unwrap();
        m.backward(&cache, 1, 1.0, &mut twice).unwrap();
        for (a, b) in once.tensors().iter().zip(twice.tensors()) {
            for (x, y) in a.data().iter().zip(b.data()) {
                assert!((2.0 * x - y).abs() <= 1e-15 * (1.0 + y.abs()));
            }
        }
    }

    #[test]
    fn wrong_length_is_rejected() {
        let vocab = build_vocab(&[nq(&["a"])], 1).unwrap();
        let m = Classifier::new(ModelKind::Lstm, tiny_arch(), vocab, 1).unwrap();
        assert!(m.forward(&["a"]).is_err());
    }

    #[test]
    fn filter_too_long_for_maxlen() {
        let vocab = build_vocab(&[nq(&["a"])], 1).unwrap();
        let mut arch = tiny_arch();
        arch.filter_width = 7;
        assert!(matches!(
            Classifier::new(ModelKind::CBiLstm, arch, vocab, 1),
            Err(Error::FilterTooLong { .. })
        ));
    }
}
