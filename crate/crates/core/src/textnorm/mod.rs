//! Query normalization.
//!
//! Raw text goes through a fixed pipeline:
//! lowercase → timestamp substitution → genre substitution → slang expansion
//! → punctuation split → tokenize → stopword removal → lemmatization
//! → left-pad / keep-last-`maxlen`.
//!
//! Timestamps, genres and slang are rewritten before punctuation is stripped
//! because "5:00pm", "r&b" and "hip-hop" all contain punctuation. The
//! substitution steps can expose new matches (a lemma can turn into a genre,
//! removing a stopword can join a slang phrase), so the pipeline is re-run on
//! its own output until the token sequence is stable.

mod lemma;
mod lexicon;

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lemma::Lemmatizer;
pub use lexicon::{parse_pairs, parse_word_list, tsv_rows, PhraseMap};

pub const DEFAULT_MAXLEN: usize = 15;
pub const UNK_TOKEN: &str = "unk";
pub const TIME_TOKEN: &str = "time_stamp";
pub const GENRE_TOKEN: &str = "music_genre";

const DEFAULT_SLANG: &str = include_str!("../../data/slang.tsv");
const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.tsv");
const DEFAULT_GENRES: &str = include_str!("../../data/genres.tsv");
const DEFAULT_LEMMA_RULES: &str = include_str!("../../data/lemma_rules.tsv");

/// H:MM / HH:MM with optional am/pm, and bare "Nam" / "Npm".
pub const DEFAULT_TIMESTAMP_PATTERNS: &[&str] = &[
    r"(?:[01]?[0-9]|2[0-3]):[0-5][0-9](?:\s?(?:am|pm))?",
    r"(?:1[0-2]|[1-9])\s?(?:am|pm)",
];

const MAX_RENORMALIZE_PASSES: usize = 8;

/// Raw user input. Any UTF-8 string is accepted.
pub type RawQuery = str;

/// Where to read lexicons from; any unset path falls back to the shipped file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormSettings {
    pub maxlen: Option<usize>,
    pub slang_path: Option<String>,
    pub stopwords_path: Option<String>,
    pub genres_path: Option<String>,
    pub lemma_rules_path: Option<String>,
    pub timestamp_patterns: Option<Vec<String>>,
}

#[derive(Debug, Clone)]
pub struct NormConfig {
    pub slang_map: PhraseMap,
    pub stopwords: HashSet<String>,
    pub genre_lexicon: PhraseMap,
    pub timestamp_patterns: Vec<String>,
    pub lemma_rules: Lemmatizer,
    pub maxlen: usize,
    pub unk_token: String,
    pub time_token: String,
    pub genre_token: String,
    timestamp_in_text: Regex,
    timestamp_token: Regex,
}

impl Default for NormConfig {
    fn default() -> Self {
        Self::from_sources(
            DEFAULT_SLANG,
            DEFAULT_STOPWORDS,
            DEFAULT_GENRES,
            DEFAULT_LEMMA_RULES,
            DEFAULT_TIMESTAMP_PATTERNS.iter().map(|s| s.to_string()).collect(),
            DEFAULT_MAXLEN,
        )
        .expect("shipped lexicons are valid")
    }
}

fn compile_timestamps(patterns: &[String]) -> Result<(Regex, Regex)> {
    if patterns.is_empty() {
        // Matches nothing.
        let never = Regex::new(r"[^\s\S]").expect("static regex");
        return Ok((never.clone(), never));
    }
    let alt = patterns
        .iter()
        .map(|p| format!("(?:{p})"))
        .collect::<Vec<_>>()
        .join("|");
    let bad = |e: regex::Error| Error::InvalidConfig(format!("timestamp pattern: {e}"));
    let in_text = Regex::new(&format!(r"\b(?:{alt})\b")).map_err(bad)?;
    let token = Regex::new(&format!(r"^(?:{alt})$")).map_err(bad)?;
    Ok((in_text, token))
}

impl NormConfig {
    /// Builds a config from lexicon file contents.
    pub fn from_sources(
        slang: &str,
        stopwords: &str,
        genres: &str,
        lemma_rules: &str,
        timestamp_patterns: Vec<String>,
        maxlen: usize,
    ) -> Result<Self> {
        let unk_token = UNK_TOKEN.to_string();
        let time_token = TIME_TOKEN.to_string();
        let genre_token = GENRE_TOKEN.to_string();
        let (timestamp_in_text, timestamp_token) = compile_timestamps(&timestamp_patterns)?;
        let cfg = NormConfig {
            slang_map: PhraseMap::new(parse_pairs(slang, "slang")?),
            stopwords: parse_word_list(stopwords).into_iter().collect(),
            genre_lexicon: PhraseMap::to_token(parse_word_list(genres), &genre_token),
            timestamp_patterns,
            lemma_rules: Lemmatizer::parse(lemma_rules)?,
            maxlen,
            unk_token,
            time_token,
            genre_token,
            timestamp_in_text,
            timestamp_token,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads lexicons named in `settings`, defaulting to the shipped ones.
    pub fn from_settings(settings: &NormSettings) -> Result<Self> {
        fn read(path: &Option<String>, fallback: &str) -> Result<String> {
            match path {
                Some(p) => Ok(fs::read_to_string(Path::new(p))?),
                None => Ok(fallback.to_string()),
            }
        }
        Self::from_sources(
            &read(&settings.slang_path, DEFAULT_SLANG)?,
            &read(&settings.stopwords_path, DEFAULT_STOPWORDS)?,
            &read(&settings.genres_path, DEFAULT_GENRES)?,
            &read(&settings.lemma_rules_path, DEFAULT_LEMMA_RULES)?,
            settings.timestamp_patterns.clone().unwrap_or_else(|| {
                DEFAULT_TIMESTAMP_PATTERNS.iter().map(|s| s.to_string()).collect()
            }),
            settings.maxlen.unwrap_or(DEFAULT_MAXLEN),
        )
    }

    pub fn with_maxlen(mut self, maxlen: usize) -> Result<Self> {
        self.maxlen = maxlen;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.maxlen == 0 {
            return Err(Error::InvalidConfig("maxlen must be at least 1".into()));
        }
        let reserved = self.reserved_tokens();
        let distinct: HashSet<&str> = reserved.iter().copied().collect();
        if distinct.len() != reserved.len() {
            return Err(Error::InvalidConfig("reserved tokens must be distinct".into()));
        }
        for tok in reserved {
            if tok.is_empty() || !tok.chars().all(is_token_char) {
                return Err(Error::InvalidConfig(format!("reserved token {tok:?} is not a valid token")));
            }
            if self.stopwords.contains(tok) {
                return Err(Error::InvalidConfig(format!("reserved token {tok:?} is a stopword")));
            }
        }
        if !self.slang_map.is_sorted_longest_first() {
            return Err(Error::InvalidConfig("slang map not sorted longest-first".into()));
        }
        Ok(())
    }

    pub fn reserved_tokens(&self) -> [&str; 3] {
        [&self.unk_token, &self.time_token, &self.genre_token]
    }

    pub fn is_reserved(&self, token: &str) -> bool {
        self.reserved_tokens().contains(&token)
    }

    /// True iff `token` is a timestamp under the configured patterns.
    pub fn detect_timestamp(&self, token: &str) -> bool {
        self.timestamp_token.is_match(&token.to_lowercase())
    }
}

/// Fixed-length token sequence, left-padded with the unknown token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedQuery {
    pub tokens: Vec<String>,
    pub original: String,
}

impl NormalizedQuery {
    /// Number of leading padding tokens.
    pub fn padding_len(&self, unk_token: &str) -> usize {
        self.tokens.iter().take_while(|t| *t == unk_token).count()
    }

    /// Tokens after the padding prefix.
    pub fn content(&self, unk_token: &str) -> &[String] {
        &self.tokens[self.padding_len(unk_token)..]
    }
}

fn is_token_char(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'
}

fn trim_chunk(chunk: &str) -> &str {
    chunk.trim_matches(|c: char| !is_token_char(c))
}

/// One pass of steps 1–8 over `text`.
fn pipeline_pass(text: &str, cfg: &NormConfig) -> Vec<String> {
    // 1. lowercase
    let lowered = text.to_lowercase();
    // 2. timestamps
    let padded_time = format!(" {} ", cfg.time_token);
    let timed = cfg.timestamp_in_text.replace_all(&lowered, padded_time.as_str());
    // Chunks keep internal punctuation so genres like "r&b" still match.
    let chunks: Vec<&str> = timed
        .split_whitespace()
        .map(trim_chunk)
        .filter(|c| !c.is_empty())
        .collect();
    // 3. genres, 4. slang
    let genred = cfg.genre_lexicon.apply(&chunks);
    let slanged = cfg.slang_map.apply(&genred);
    // 5–6. punctuation becomes a separator
    let tokens = slanged
        .iter()
        .flat_map(|chunk| chunk.split(|c: char| !is_token_char(c)))
        .filter(|t| !t.is_empty());
    // 7. stopwords; a typed padding token would break the padding-prefix invariant
    // 8. lemmas
    tokens
        .filter(|t| !cfg.stopwords.contains(*t) && *t != cfg.unk_token)
        .map(|t| {
            if cfg.is_reserved(t) {
                t.to_string()
            } else {
                cfg.lemma_rules.lemmatize(t)
            }
        })
        .filter(|t| !cfg.stopwords.contains(t) || cfg.is_reserved(t))
        .collect()
}

/// Content tokens of `text` (no padding, no truncation).
pub fn normalize_tokens(text: &str, cfg: &NormConfig) -> Vec<String> {
    let mut tokens = pipeline_pass(text, cfg);
    for _ in 0..MAX_RENORMALIZE_PASSES {
        let next = pipeline_pass(&tokens.join(" "), cfg);
        if next == tokens {
            break;
        }
        tokens = next;
    }
    tokens
}

/// Normalizes a raw query into exactly `cfg.maxlen` tokens.
///
/// Short queries are left-padded with the unknown token; long ones keep only
/// their last `maxlen` tokens.
pub fn normalize(raw: &RawQuery, cfg: &NormConfig) -> NormalizedQuery {
    let content = normalize_tokens(raw, cfg);
    NormalizedQuery {
        tokens: pad_or_truncate(content, cfg.maxlen, &cfg.unk_token),
        original: raw.to_string(),
    }
}

fn pad_or_truncate(mut content: Vec<String>, maxlen: usize, unk: &str) -> Vec<String> {
    if content.len() >= maxlen {
        content.split_off(content.len() - maxlen)
    } else {
        let mut tokens = vec![unk.to_string(); maxlen - content.len()];
        tokens.extend(content);
        tokens
    }
}

/// Leftmost-longest phrase rewriting over a token sequence.
pub fn apply_phrase_map<S: AsRef<str>>(tokens: &[S], map: &PhraseMap) -> Vec<String> {
    map.apply(tokens)
}
