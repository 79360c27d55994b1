//! Binary checkpoint: magic, length-prefixed JSON manifest, raw f64 tensors.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::classifier::{Architecture, Classifier, ModelKind};
use crate::binio::{write_f64s, write_magic_and_manifest, Reader};
use crate::error::{Error, Result};
use crate::vocab_embed::Vocabulary;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"CBLSTM01";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct TensorSpec {
    name: String,
    shape: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    kind: ModelKind,
    architecture: Architecture,
    embedding_seed: u64,
    vocabulary: Vec<String>,
    tensors: Vec<TensorSpec>,
}

pub fn save_to_bytes(model: &Classifier) -> Result<Vec<u8>> {
    let named = model.params.named();
    let manifest = Manifest {
        version: CHECKPOINT_VERSION,
        kind: model.kind,
        architecture: model.arch.clone(),
        embedding_seed: model.params.embedding.seed,
        vocabulary: model.vocab.tokens().to_vec(),
        tensors: named
            .iter()
            .map(|(name, t)| TensorSpec {
                name: name.to_string(),
                shape: t.shape().to_vec(),
            })
            .collect(),
    };
    let json = serde_json::to_vec(&manifest)?;
    let floats: usize = named.iter().map(|(_, t)| t.len()).sum();
    let mut out = Vec::with_capacity(16 + json.len() + 8 * floats);
    write_magic_and_manifest(&mut out, CHECKPOINT_MAGIC, &json);
    for (_, t) in named {
        write_f64s(&mut out, t.data());
    }
    Ok(out)
}

pub fn load_from_bytes(bytes: &[u8]) -> Result<Classifier> {
    let mut r = Reader::new(bytes, "checkpoint");
    r.expect_magic(CHECKPOINT_MAGIC)?;
    let manifest: Manifest = serde_json::from_slice(r.len_prefixed_u64()?)
        .map_err(|e| Error::Format(format!("checkpoint manifest: {e}")))?;
    if manifest.version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!(
            "checkpoint version mismatch: expected {CHECKPOINT_VERSION}, found {}",
            manifest.version
        )));
    }
    let vocab = Vocabulary::from_tokens(manifest.vocabulary)?;
    // Fresh parameters give the per-kind layout; their values are overwritten.
    let mut model = Classifier::new(manifest.kind, manifest.architecture, vocab, manifest.embedding_seed)?;
    let expected: Vec<(String, Vec<usize>)> = model
        .params
        .named()
        .into_iter()
        .map(|(n, t)| (n.to_string(), t.shape().to_vec()))
        .collect();
    if expected.len() != manifest.tensors.len() {
        return Err(Error::Format(format!(
            "checkpoint for {} should hold {} tensors, manifest lists {}",
            manifest.kind,
            expected.len(),
            manifest.tensors.len()
        )));
    }
    for ((name, shape), spec) in expected.iter().zip(&manifest.tensors) {
        if *name != spec.name || *shape != spec.shape {
            return Err(Error::Format(format!(
                "checkpoint tensor mismatch: expected {name} {shape:?}, found {} {:?}",
                spec.name, spec.shape
            )));
        }
    }
    for t in model.params.tensors_mut() {
        let values = r.f64s(t.len())?;
        t.data_mut().copy_from_slice(&values);
    }
    r.finish()?;
    Ok(model)
}

pub fn save(model: &Classifier, path: &Path) -> Result<()> {
    fs::write(path, save_to_bytes(model)?)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Classifier> {
    load_from_bytes(&fs::read(path)?)
}
