//! Token vocabulary and the word / letter-trigram embedding table.
//!
//! In-vocabulary tokens use their own row of `word_vectors`. Any other token
//! is framed as `#token#`, split into overlapping letter trigrams, and each
//! trigram is hashed into one of `B` buckets of `trigram_vectors`; the token's
//! vector is the mean of those bucket rows (with multiplicity). The hash is
//! 64-bit FNV-1a over the trigram's UTF-8 bytes, reduced modulo `B`:
//!
//! ```text
//! h = 0xcbf29ce484222325
//! for byte in trigram: h = (h ^ byte) * 0x100000001b3   (wrapping)
//! bucket = h % B
//! ```

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nnet::Tensor;
use crate::textnorm::{NormalizedQuery, GENRE_TOKEN, TIME_TOKEN, UNK_TOKEN};

pub const DEFAULT_BUCKETS: usize = 4096;
pub const INIT_RANGE: f64 = 0.05;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub const UNK_ID: usize = 0;

    /// Builds a vocabulary from tokens in id order. The three reserved tokens
    /// must come first as unk, time, genre.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.len() < 3 || tokens[0] != UNK_TOKEN || tokens[1] != TIME_TOKEN || tokens[2] != GENRE_TOKEN {
            return Err(Error::Format("vocabulary must start with the reserved tokens".into()));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::Format(format!("duplicate vocabulary token {t:?}")));
            }
        }
        Ok(Vocabulary { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Every token with at least `min_count` occurrences, plus the reserved
/// tokens; ids follow first occurrence in corpus order.
pub fn build_vocab(corpus: &[NormalizedQuery], min_count: usize) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut order: Vec<&str> = Vec::new();
    for q in corpus {
        for t in &q.tokens {
            let c = counts.entry(t.as_str()).or_insert_with(|| {
                order.push(t.as_str());
                0
            });
            *c += 1;
        }
    }
    let mut tokens: Vec<String> = [UNK_TOKEN, TIME_TOKEN, GENRE_TOKEN].map(String::from).to_vec();
    tokens.extend(
        order
            .into_iter()
            .filter(|t| counts[t] >= min_count.max(1) && ![UNK_TOKEN, TIME_TOKEN, GENRE_TOKEN].contains(t))
            .map(str::to_string),
    );
    Vocabulary::from_tokens(tokens)
}

/// 64-bit FNV-1a of the trigram's UTF-8 bytes, modulo `buckets`.
pub fn trigram_bucket(trigram: &str, buckets: usize) -> usize {
    let h = trigram
        .bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME));
    (h % buckets as u64) as usize
}

/// Overlapping letter trigrams of `#word#`. Empty for an empty word.
pub fn letter_trigrams(word: &str) -> Vec<String> {
    if word.is_empty() {
        return Vec::new();
    }
    let framed: Vec<char> = format!("#{word}#").chars().collect();
    framed.windows(3).map(|w| w.iter().collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    /// `|V| × d`
    pub word_vectors: Tensor,
    /// `B × d`
    pub trigram_vectors: Tensor,
    pub seed: u64,
}

impl EmbeddingTable {
    /// Uniform in `[-0.05, 0.05]` from a seeded generator.
    pub fn new(vocab_size: usize, dim: usize, buckets: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        EmbeddingTable {
            word_vectors: Tensor::uniform(&[vocab_size, dim], INIT_RANGE, &mut rng),
            trigram_vectors: Tensor::uniform(&[buckets.max(1), dim], INIT_RANGE, &mut rng),
            seed,
        }
    }

    pub fn dim(&self) -> usize {
        self.word_vectors.cols()
    }

    pub fn buckets(&self) -> usize {
        self.trigram_vectors.rows()
    }

    pub fn zeros_like(&self) -> Self {
        EmbeddingTable {
            word_vectors: self.word_vectors.zeros_like(),
            trigram_vectors: self.trigram_vectors.zeros_like(),
            seed: self.seed,
        }
    }
}

/// Where a token's vector comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenSource {
    Word(usize),
    Trigrams(Vec<usize>),
}

pub fn resolve_token(token: &str, vocab: &Vocabulary, table: &EmbeddingTable) -> TokenSource {
    if let Some(id) = vocab.id(token) {
        return TokenSource::Word(id);
    }
    let buckets: Vec<usize> = letter_trigrams(token)
        .iter()
        .map(|t| trigram_bucket(t, table.buckets()))
        .collect();
    if buckets.is_empty() {
        TokenSource::Word(Vocabulary::UNK_ID)
    } else {
        TokenSource::Trigrams(buckets)
    }
}

fn source_vector(source: &TokenSource, table: &EmbeddingTable) -> Vec<f64> {
    match source {
        TokenSource::Word(id) => table.word_vectors.row(*id).to_vec(),
        TokenSource::Trigrams(buckets) => {
            let mut v = vec![0.0; table.dim()];
            for &b in buckets {
                for (acc, x) in v.iter_mut().zip(table.trigram_vectors.row(b)) {
                    *acc += x;
                }
            }
            let n = buckets.len() as f64;
            v.iter_mut().for_each(|x| *x /= n);
            v
        }
    }
}

/// Vector of a single token; never fails.
pub fn embed_token(token: &str, vocab: &Vocabulary, table: &EmbeddingTable) -> Vec<f64> {
    source_vector(&resolve_token(token, vocab, table), table)
}

/// `d × maxlen` matrix whose column `j` embeds token `j`.
pub fn embed_query(nq: &NormalizedQuery, vocab: &Vocabulary, table: &EmbeddingTable) -> Tensor {
    embed_tokens(&nq.tokens, vocab, table).0
}

/// Like [`embed_query`], also returning each column's source for backprop.
pub fn embed_tokens<S: AsRef<str>>(
    tokens: &[S],
    vocab: &Vocabulary,
    table: &EmbeddingTable,
) -> (Tensor, Vec<TokenSource>) {
    let d = table.dim();
    let l = tokens.len();
    let mut q = Tensor::zeros(&[d, l]);
    let mut sources = Vec::with_capacity(l);
    for (j, tok) in tokens.iter().enumerate() {
        let src = resolve_token(tok.as_ref(), vocab, table);
        let v = source_vector(&src, table);
        for (i, x) in v.into_iter().enumerate() {
            q.data_mut()[i * l + j] = x;
        }
        sources.push(src);
    }
    (q, sources)
}

/// Scatters `dL/dQ` back onto the table rows that produced each column.
pub fn embed_backward(d_q: &Tensor, sources: &[TokenSource], grad: &mut EmbeddingTable) {
    let l = sources.len();
    let d = grad.dim();
    for (j, src) in sources.iter().enumerate() {
        let col: Vec<f64> = (0..d).map(|i| d_q.data()[i * l + j]).collect();
        match src {
            TokenSource::Word(id) => {
                for (g, c) in grad.word_vectors.row_mut(*id).iter_mut().zip(&col) {
                    *g += c;
                }
            }
            TokenSource::Trigrams(buckets) => {
                let share = 1.0 / buckets.len() as f64;
                for &b in buckets {
                    for (g, c) in grad.trigram_vectors.row_mut(b).iter_mut().zip(&col) {
                        *g += c * share;
                    }
                }
            }
        }
    }
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalized_or_basis(mut v: Vec<f64>) -> Vec<f64> {
    let n = l2_norm(&v);
    if n > 0.0 && n.is_finite() {
        v.iter_mut().for_each(|x| *x /= n);
        v
    } else {
        let mut e = vec![0.0; v.len()];
        if let Some(first) = e.first_mut() {
            *first = 1.0;
        }
        e
    }
}

/// Unit-norm sentence vector: the mean of the non-padding token embeddings.
///
/// An all-padding query maps to the normalized unknown-token vector; a zero
/// mean maps to the first basis vector.
pub fn query_vector(nq: &NormalizedQuery, vocab: &Vocabulary, table: &EmbeddingTable) -> Vec<f64> {
    let content = nq.content(UNK_TOKEN);
    if content.is_empty() {
        return normalized_or_basis(table.word_vectors.row(Vocabulary::UNK_ID).to_vec());
    }
    let mut mean = vec![0.0; table.dim()];
    for tok in content {
        for (m, x) in mean.iter_mut().zip(embed_token(tok, vocab, table)) {
            *m += x;
        }
    }
    let n = content.len() as f64;
    mean.iter_mut().for_each(|x| *x /= n);
    normalized_or_basis(mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nq(tokens: &[&str], maxlen: usize) -> NormalizedQuery {
        let mut t = vec![UNK_TOKEN.to_string(); maxlen - tokens.len()];
        t.extend(tokens.iter().map(|s| s.to_string()));
        NormalizedQuery {
            tokens: t,
            original: tokens.join(" "),
        }
    }

    #[test]
    fn vocab_of_one_query() {
        let v = build_vocab(&[nq(&["help", "alarm"], 5)], 1).unwrap();
        assert_eq!(v.tokens(), ["unk", "time_stamp", "music_genre", "help", "alarm"]);
    }

    #[test]
    fn min_count_filters() {
        let corpus = [nq(&["help", "alarm"], 4), nq(&["help", "music"], 4)];
        let v = build_vocab(&corpus, 2).unwrap();
        assert!(v.contains("help"));
        assert!(!v.contains("alarm"));
        assert!(v.contains(UNK_TOKEN));
    }

    #[test]
    fn vocab_is_replayable() {
        let corpus = [nq(&["b", "a"], 3), nq(&["c", "a"], 3)];
        assert_eq!(build_vocab(&corpus, 1).unwrap(), build_vocab(&corpus, 1).unwrap());
    }

    #[test]
    fn empty_corpus() {
        assert!(matches!(build_vocab(&[], 1), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn trigrams_of_misspelling() {
        assert_eq!(letter_trigrams("alrm"), ["#al", "alr", "lrm", "rm#"]);
        assert_eq!(letter_trigrams("a"), ["#a#"]);
        assert!(letter_trigrams("").is_empty());
    }

    #[test]
    fn fnv1a_reference_values() {
        // Published FNV-1a 64 test vectors: "" and "a".
        assert_eq!(trigram_bucket("", u64::MAX as usize), (0xcbf29ce484222325u64 % u64::MAX) as usize);
        let a = 0xaf63dc4c8601ec8cu64;
        assert_eq!(trigram_bucket("a", 1 << 20), (a % (1 << 20)) as usize);
    }

    #[test]
    fn oov_is_mean_of_buckets() {
        let vocab = build_vocab(&[nq(&["alarm"], 2)], 1).unwrap();
        let table = EmbeddingTable::new(vocab.len(), 6, 64, 9);
        let v = embed_token("alrm", &vocab, &table);
        let mut want = vec![0.0; 6];
        for tri in ["#al", "alr", "lrm", "rm#"] {
            let b = trigram_bucket(tri, 64);
            for (w, x) in want.iter_mut().zip(table.trigram_vectors.row(b)) {
                *w += x / 4.0;
            }
        }
        for (a, b) in v.iter().zip(&want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(embed_token("alarm", &vocab, &table), table.word_vectors.row(3));
    }

    #[test]
    fn embed_query_columns() {
        let vocab = build_vocab(&[nq(&["help"], 2)], 1).unwrap();
        let table = EmbeddingTable::new(vocab.len(), 4, 16, 1);
        let q = embed_query(&nq(&["help"], 4), &vocab, &table);
        assert_eq!(q.shape(), &[4, 4]);
        let unk = table.word_vectors.row(0).to_vec();
        let differing = (0..4).filter(|&j| q.column(j) != unk).count();
        assert_eq!(differing, 1);
        assert_eq!(q.column(3), table.word_vectors.row(3));
    }

    #[test]
    fn query_vector_contracts() {
        let vocab = build_vocab(&[nq(&["help", "alarm"], 3)], 1).unwrap();
        let table = EmbeddingTable::new(vocab.len(), 8, 32, 5);
        let a = query_vector(&nq(&["help", "alarm"], 4), &vocab, &table);
        let b = query_vector(&nq(&["alarm", "help"], 4), &vocab, &table);
        assert!((l2_norm(&a) - 1.0).abs() < 1e-9);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        let single = query_vector(&nq(&["help"], 4), &vocab, &table);
        let row = table.word_vectors.row(3);
        let n = l2_norm(row);
        for (x, r) in single.iter().zip(row) {
            assert!((x - r / n).abs() < 1e-12);
        }
        let empty = query_vector(&nq(&[], 4), &vocab, &table);
        assert!((l2_norm(&empty) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_mean_falls_back_to_basis() {
        let vocab = build_vocab(&[nq(&["x"], 1)], 1).unwrap();
        let mut table = EmbeddingTable::new(vocab.len(), 3, 4, 0);
        table.word_vectors.fill(0.0);
        assert_eq!(query_vector(&nq(&["x"], 2), &vocab, &table), vec![1.0, 0.0, 0.0]);
    }
}
