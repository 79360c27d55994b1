//! Response retrieval: nearest cached help queries by cosine similarity,
//! gated by a threshold and a majority vote.

mod index;
mod kdtree;

pub use index::{
    holds_plurality, FetchOptions, IndexedQuery, MatchResult, NeighborInfo, ResponseEntry, RetrievalIndex,
    DEFAULT_K, DEFAULT_THRESHOLD, INDEX_MAGIC, INDEX_VERSION,
};
pub use kdtree::{
    brute_force_knn, check_unit, cosine, sq_dist, unit_cosine, KdTree, Neighbor, SearchMode, DEFAULT_BUCKET_SIZE,
    UNIT_TOLERANCE,
};

use crate::error::Result;
use crate::models::{Classifier, LabeledQuery};
use crate::textnorm::NormConfig;

/// Sentence vector of a raw query under `model`'s normalization and
/// embedding table.
pub fn embed(model: &Classifier, norm: &NormConfig, raw: &str) -> Result<Vec<f64>> {
    let nq = model.normalize(raw, norm)?;
    Ok(model.sentence_vector(&nq))
}

/// Indexes every help query in `data` that carries a response id.
pub fn index_dataset(
    model: &Classifier,
    norm: &NormConfig,
    data: &[LabeledQuery],
    responses: Vec<ResponseEntry>,
    bucket_size: usize,
) -> Result<RetrievalIndex> {
    let mut entries = Vec::new();
    for q in data.iter().filter(|q| q.label.is_help()) {
        let Some(response_id) = &q.response_id else { continue };
        entries.push(IndexedQuery {
            query_text: q.text.clone(),
            vector: embed(model, norm, &q.text)?,
            response_id: response_id.clone(),
        });
    }
    RetrievalIndex::build(entries, responses, model.arch.embed_dim, bucket_size)
}

/// Embeds `raw` and matches it against the index.
pub fn fetch_response(
    index: &RetrievalIndex,
    model: &Classifier,
    norm: &NormConfig,
    raw: &str,
    opts: &FetchOptions,
) -> Result<MatchResult> {
    let v = embed(model, norm, raw)?;
    index.match_vector(&v, opts)
}
