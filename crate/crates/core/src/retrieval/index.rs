//! Response index: cached query vectors, their responses, and the tree.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::kdtree::{check_unit, KdTree, Neighbor, SearchMode, DEFAULT_BUCKET_SIZE};
use crate::binio::{write_f64s, write_magic_and_manifest, write_string_u32, Reader};
use crate::error::{Error, Result};

pub const INDEX_MAGIC: &[u8; 8] = b"HLPIDX01";
pub const INDEX_VERSION: u32 = 1;
pub const DEFAULT_THRESHOLD: f64 = 0.75;
pub const DEFAULT_K: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseEntry {
    pub response_id: String,
    pub response_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexedQuery {
    pub query_text: String,
    pub vector: Vec<f64>,
    pub response_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborInfo {
    pub query: String,
    pub similarity: f64,
    pub response_id: String,
}

/// Outcome of one retrieval. `matched_query` and `similarity` describe the
/// closest neighbor and are absent only for an empty index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub matched_query: Option<String>,
    pub similarity: Option<f64>,
    pub response: Option<ResponseEntry>,
    pub neighbors: Vec<NeighborInfo>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FetchOptions {
    pub threshold: f64,
    pub k: usize,
    pub mode: SearchMode,
}

impl Default for FetchOptions {
    fn default() -> Self {
        FetchOptions {
            threshold: DEFAULT_THRESHOLD,
            k: DEFAULT_K,
            mode: SearchMode::Exact,
        }
    }
}

impl FetchOptions {
    pub fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidConfig(format!(
                "threshold {} outside [-1, 1]",
                self.threshold
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        Ok(())
    }
}

/// Immutable nearest-neighbor index over labeled help queries.
#[derive(Debug, Clone)]
pub struct RetrievalIndex {
    entries: Vec<IndexedQuery>,
    responses: Vec<ResponseEntry>,
    by_id: HashMap<String, usize>,
    tree: KdTree,
}

impl RetrievalIndex {
    /// Validates entries against the response table and builds the tree.
    pub fn build(
        entries: Vec<IndexedQuery>,
        responses: Vec<ResponseEntry>,
        dim: usize,
        bucket_size: usize,
    ) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(responses.len());
        for (i, r) in responses.iter().enumerate() {
            if by_id.insert(r.response_id.clone(), i).is_some() {
                return Err(Error::Dataset(format!("duplicate response id {:?}", r.response_id)));
            }
        }
        for e in &entries {
            if e.vector.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.vector.len(),
                });
            }
            check_unit(&e.vector)?;
            if !by_id.contains_key(&e.response_id) {
                return Err(Error::Dataset(format!(
                    "indexed query {:?} refers to unknown response {:?}",
                    e.query_text, e.response_id
                )));
            }
        }
        let vectors: Vec<&[f64]> = entries.iter().map(|e| e.vector.as_slice()).collect();
        let tree = KdTree::build(&vectors, dim, bucket_size)?;
        Ok(RetrievalIndex {
            entries,
            responses,
            by_id,
            tree,
        })
    }

    pub fn with_default_buckets(entries: Vec<IndexedQuery>, responses: Vec<ResponseEntry>, dim: usize) -> Result<Self> {
        Self::build(entries, responses, dim, DEFAULT_BUCKET_SIZE)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.tree.dim()
    }

    pub fn entries(&self) -> &[IndexedQuery] {
        &self.entries
    }

    pub fn responses(&self) -> &[ResponseEntry] {
        &self.responses
    }

    pub fn tree(&self) -> &KdTree {
        &self.tree
    }

    pub fn response(&self, id: &str) -> Option<&ResponseEntry> {
        self.by_id.get(id).map(|&i| &self.responses[i])
    }

    pub fn knn(&self, q: &[f64], k: usize, mode: SearchMode) -> Result<Vec<Neighbor>> {
        self.tree.knn(q, k, mode)
    }

    /// Answers with the closest neighbor's response when its similarity
    /// reaches the threshold and its response holds a strict plurality among
    /// the `k` neighbors.
    pub fn match_vector(&self, q: &[f64], opts: &FetchOptions) -> Result<MatchResult> {
        opts.validate()?;
        let found = self.knn(q, opts.k, opts.mode)?;
        let neighbors: Vec<NeighborInfo> = found
            .iter()
            .map(|n| {
                let e = &self.entries[n.id];
                NeighborInfo {
                    query: e.query_text.clone(),
                    similarity: n.similarity,
                    response_id: e.response_id.clone(),
                }
            })
            .collect();
        let Some(first) = neighbors.first() else {
            return Ok(MatchResult {
                matched_query: None,
                similarity: None,
                response: None,
                neighbors,
            });
        };
        let response = (first.similarity >= opts.threshold && holds_plurality(&neighbors))
            .then(|| self.response(&first.response_id).cloned())
            .flatten();
        Ok(MatchResult {
            matched_query: Some(first.query.clone()),
            similarity: Some(first.similarity),
            response,
            neighbors,
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let manifest = IndexManifest {
            version: INDEX_VERSION,
            d: self.dim(),
            count: self.len(),
            bucket_size: self.tree.bucket_size(),
            responses: self.responses.clone(),
        };
        let json = serde_json::to_vec(&manifest)?;
        let mut out = Vec::new();
        write_magic_and_manifest(&mut out, INDEX_MAGIC, &json);
        for e in &self.entries {
            write_string_u32(&mut out, &e.query_text);
            write_string_u32(&mut out, &e.response_id);
            write_f64s(&mut out, &e.vector);
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, "index");
        r.expect_magic(INDEX_MAGIC)?;
        let manifest: IndexManifest = serde_json::from_slice(r.len_prefixed_u64()?)
            .map_err(|e| Error::Format(format!("index manifest: {e}")))?;
        if manifest.version != INDEX_VERSION {
            return Err(Error::Format(format!(
                "index version mismatch: expected {INDEX_VERSION}, found {}",
                manifest.version
            )));
        }
        let mut entries = Vec::with_capacity(manifest.count.min(1 << 20));
        for _ in 0..manifest.count {
            let query_text = r.string_u32()?;
            let response_id = r.string_u32()?;
            let vector = r.f64s(manifest.d)?;
            entries.push(IndexedQuery {
                query_text,
                vector,
                response_id,
            });
        }
        r.finish()?;
        Self::build(entries, manifest.responses, manifest.d, manifest.bucket_size)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct IndexManifest {
    version: u32,
    d: usize,
    count: usize,
    bucket_size: usize,
    responses: Vec<ResponseEntry>,
}

/// True when the first neighbor's response is strictly more frequent than
/// every other response among `neighbors`.
pub fn holds_plurality(neighbors: &[NeighborInfo]) -> bool {
    let Some(first) = neighbors.first() else {
        return false;
    };
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for n in neighbors {
        *counts.entry(n.response_id.as_str()).or_default() += 1;
    }
    let mine = counts[first.response_id.as_str()];
    counts
        .iter()
        .all(|(id, &c)| *id == first.response_id || c < mine)
}
