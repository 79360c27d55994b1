//! The full query path: normalize, classify, retrieve, and the rule-based
//! baseline alongside for comparison.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Classifier, DECISION_THRESHOLD};
use crate::pos_mapper::{answer_tokens, Lexicons};
use crate::retrieval::{FetchOptions, RetrievalIndex, SearchMode, DEFAULT_K, DEFAULT_THRESHOLD};
use crate::textnorm::{normalize, NormConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRequest {
    pub text: String,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub k: Option<usize>,
}

impl QueryRequest {
    pub fn new(text: impl Into<String>) -> Self {
        QueryRequest {
            text: text.into(),
            threshold: None,
            k: None,
        }
    }

    pub fn validate(&self) -> Result<FetchOptions> {
        if self.text.trim().is_empty() {
            return Err(Error::InvalidRequest("text must not be empty".into()));
        }
        let threshold = self.threshold.unwrap_or(DEFAULT_THRESHOLD);
        if !(-1.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidRequest(format!("threshold {threshold} outside [-1, 1]")));
        }
        let k = self.k.unwrap_or(DEFAULT_K);
        if k == 0 {
            return Err(Error::InvalidRequest("k must be at least 1".into()));
        }
        Ok(FetchOptions {
            threshold,
            k,
            mode: SearchMode::Exact,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchInfo {
    pub matched_query: String,
    pub similarity: f64,
    pub response_id: String,
    pub response_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosInfo {
    pub action: Option<String>,
    pub skill: Option<String>,
    pub response_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    /// Content tokens after normalization, without padding.
    pub normalized_tokens: Vec<String>,
    pub is_help: bool,
    pub p_help: f64,
    #[serde(rename = "match")]
    pub matched: Option<MatchInfo>,
    pub pos_baseline: Option<PosInfo>,
    pub latency_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub model_kind: String,
    pub index_size: usize,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillSummary {
    pub skill: String,
    pub actions: Vec<String>,
    pub sample_query: String,
}

/// Loaded model, index and lexicons; immutable once built.
#[derive(Debug, Clone)]
pub struct Engine {
    pub model: Classifier,
    pub index: RetrievalIndex,
    pub lexicons: Lexicons,
    pub norm: NormConfig,
}

impl Engine {
    pub fn new(model: Classifier, index: RetrievalIndex, lexicons: Lexicons, norm: NormConfig) -> Result<Self> {
        if index.dim() != model.arch.embed_dim && !index.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: model.arch.embed_dim,
                found: index.dim(),
            });
        }
        let norm = norm.with_maxlen(model.arch.maxlen)?;
        Ok(Engine {
            model,
            index,
            lexicons,
            norm,
        })
    }

    pub fn query(&self, req: &QueryRequest) -> Result<QueryResponse> {
        let started = Instant::now();
        let opts = req.validate()?;
        let nq = normalize(&req.text, &self.norm);
        let p_help = self.model.predict_normalized(&nq)?;
        let is_help = p_help >= DECISION_THRESHOLD;
        let content = nq.content(&self.norm.unk_token).to_vec();
        let (matched, pos_baseline) = if is_help {
            let v = self.model.sentence_vector(&nq);
            let m = self.index.match_vector(&v, &opts)?;
            let matched = match (m.response, m.matched_query, m.similarity) {
                (Some(r), Some(q), Some(s)) => Some(MatchInfo {
                    matched_query: q,
                    similarity: s,
                    response_id: r.response_id,
                    response_text: r.response_text,
                }),
                _ => None,
            };
            let pos = answer_tokens(&content, &self.lexicons);
            (
                matched,
                Some(PosInfo {
                    action: pos.action,
                    skill: pos.skill,
                    response_id: pos.response_id,
                }),
            )
        } else {
            (None, None)
        };
        Ok(QueryResponse {
            normalized_tokens: content,
            is_help,
            p_help,
            matched,
            pos_baseline,
            latency_ms: started.elapsed().as_secs_f64() * 1e3,
        })
    }

    pub fn health(&self) -> Health {
        Health {
            model_kind: self.model.kind.to_string(),
            index_size: self.index.len(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn skills(&self) -> Vec<SkillSummary> {
        skill_directory(&self.lexicons)
    }
}

/// One entry per skill in the action-skill table, sorted by skill name.
pub fn skill_directory(lex: &Lexicons) -> Vec<SkillSummary> {
    lex.table
        .skills()
        .into_iter()
        .map(|(skill, actions)| SkillSummary {
            skill: skill.to_string(),
            sample_query: lex.sample_query(actions[0], skill),
            actions: actions.into_iter().map(str::to_string).collect(),
        })
        .collect()
}
