//! Rule-driven lemmatizer: whole-word exceptions plus ordered suffix rewrites.

use std::collections::HashMap;

use super::lexicon::tsv_rows;
use crate::error::{Error, Result};

const MAX_PASSES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
struct SuffixRule {
    suffix: String,
    replacement: String,
    min_stem: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lemmatizer {
    exceptions: HashMap<String, String>,
    rules: Vec<SuffixRule>,
}

impl Lemmatizer {
    /// Parses the rule file format (see `data/lemma_rules.tsv`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lem = Lemmatizer::default();
        for (line, fields) in tsv_rows(text) {
            let bad = |reason: &str| Error::Lexicon {
                file: "lemma_rules".to_string(),
                line,
                reason: reason.to_string(),
            };
            if let Some(word) = fields[0].strip_prefix('=') {
                let lemma = fields.get(1).ok_or_else(|| bad("exception needs a lemma"))?;
                if word.is_empty() || lemma.is_empty() {
                    return Err(bad("empty exception"));
                }
                lem.exceptions.insert(word.to_string(), lemma.to_string());
                continue;
            }
            let [suffix, replacement, min_stem] = fields.as_slice() else {
                return Err(bad("expected suffix<TAB>replacement<TAB>min_stem"));
            };
            let min_stem: usize = min_stem.trim().parse().map_err(|_| bad("min_stem is not an integer"))?;
            if suffix.is_empty() {
                return Err(bad("empty suffix"));
            }
            if min_stem == 0 && replacement.is_empty() {
                return Err(bad("rule could erase a whole word"));
            }
            lem.rules.push(SuffixRule {
                suffix: suffix.to_string(),
                replacement: replacement.to_string(),
                min_stem,
            });
        }
        Ok(lem)
    }

    fn step(&self, word: &str) -> Option<String> {
        if let Some(lemma) = self.exceptions.get(word) {
            return (lemma != word).then(|| lemma.clone());
        }
        for rule in &self.rules {
            let Some(stem) = word.strip_suffix(rule.suffix.as_str()) else {
                continue;
            };
            if stem.chars().count() < rule.min_stem {
                continue;
            }
            if rule.replacement == rule.suffix {
                return None;
            }
            return Some(format!("{stem}{}", rule.replacement));
        }
        None
    }

    /// Applies the rules until the word stops changing.
    pub fn lemmatize(&self, word: &str) -> String {
        let mut current = word.to_string();
        for _ in 0..MAX_PASSES {
            match self.step(&current) {
                Some(next) if !next.is_empty() => current = next,
                _ => break,
            }
        }
        current
    }
}
