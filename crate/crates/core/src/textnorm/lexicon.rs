//! Tab-separated lexicon files and the phrase maps built from them.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Non-empty, non-comment lines of a lexicon file, each split on tabs.
///
/// Yields `(line_number, fields)` with 1-based line numbers.
pub fn tsv_rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').collect()))
        }
    })
}

/// Parses a one-column word list (stopwords, genres).
pub fn parse_word_list(text: &str) -> Vec<String> {
    tsv_rows(text)
        .map(|(_, fields)| fields[0].trim().to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Parses a two-column `phrase<TAB>replacement` file.
pub fn parse_pairs(text: &str, file: &str) -> Result<Vec<(String, String)>> {
    tsv_rows(text)
        .map(|(line, fields)| match fields.as_slice() {
            [phrase, replacement, ..] if !phrase.trim().is_empty() => Ok((
                phrase.trim().to_lowercase(),
                replacement.trim().to_lowercase(),
            )),
            _ => Err(Error::Lexicon {
                file: file.to_string(),
                line,
                reason: "expected phrase<TAB>replacement".to_string(),
            }),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
struct PhraseEntry {
    phrase: Vec<String>,
    replacement: Vec<String>,
}

/// Multi-token phrase rewriter with leftmost-longest, non-overlapping matching.
///
/// Entries are kept sorted longest-phrase-first so that "gonna go" wins over
/// "gonna" when both start at the same position.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhraseMap {
    entries: Vec<PhraseEntry>,
    by_head: HashMap<String, Vec<usize>>,
}

impl PhraseMap {
    pub fn new<I, P, R>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (P, R)>,
        P: AsRef<str>,
        R: AsRef<str>,
    {
        let mut entries: Vec<PhraseEntry> = pairs
            .into_iter()
            .filter_map(|(p, r)| {
                let phrase: Vec<String> = p.as_ref().split_whitespace().map(str::to_string).collect();
                if phrase.is_empty() {
                    return None;
                }
                let replacement = r.as_ref().split_whitespace().map(str::to_string).collect();
                Some(PhraseEntry { phrase, replacement })
            })
            .collect();
        // Stable sort keeps file order among phrases of equal length.
        entries.sort_by_key(|e| std::cmp::Reverse(e.phrase.len()));
        entries.dedup_by(|b, a| a.phrase == b.phrase);

        let mut by_head: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            by_head.entry(e.phrase[0].clone()).or_default().push(i);
        }
        PhraseMap { entries, by_head }
    }

    /// Builds a map sending every phrase to the same single token.
    pub fn to_token<I, P>(phrases: I, token: &str) -> Self
    where
        I: IntoIterator<Item = P>,
        P: AsRef<str>,
    {
        Self::new(phrases.into_iter().map(|p| (p.as_ref().to_string(), token.to_string())))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every phrase has at least as many tokens as the one after it.
    pub fn is_sorted_longest_first(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[0].phrase.len() >= w[1].phrase.len())
    }

    pub fn phrases(&self) -> impl Iterator<Item = String> + '_ {
        self.entries.iter().map(|e| e.phrase.join(" "))
    }

    pub fn replacements(&self) -> impl Iterator<Item = &[String]> + '_ {
        self.entries.iter().map(|e| e.replacement.as_slice())
    }

    /// Length in tokens of the longest entry matching at `tokens[start..]`,
    /// together with its index.
    fn longest_match<S: AsRef<str>>(&self, tokens: &[S], start: usize) -> Option<(usize, usize)> {
        let head = tokens[start].as_ref();
        let candidates = self.by_head.get(head)?;
        candidates.iter().find_map(|&i| {
            let phrase = &self.entries[i].phrase;
            let end = start + phrase.len();
            let hit = end <= tokens.len()
                && phrase
                    .iter()
                    .zip(&tokens[start..end])
                    .all(|(p, t)| p == t.as_ref());
            hit.then_some((i, phrase.len()))
        })
    }

    /// Every entry matching at `tokens[start..]`, longest first, as
    /// `(len, replacement)`.
    pub fn matches_at<S: AsRef<str>>(&self, tokens: &[S], start: usize) -> Vec<(usize, &[String])> {
        let Some(candidates) = tokens.get(start).and_then(|t| self.by_head.get(t.as_ref())) else {
            return Vec::new();
        };
        candidates
            .iter()
            .filter_map(|&i| {
                let phrase = &self.entries[i].phrase;
                let end = start + phrase.len();
                let hit = end <= tokens.len()
                    && phrase
                        .iter()
                        .zip(&tokens[start..end])
                        .all(|(p, t)| p == t.as_ref());
                hit.then_some((phrase.len(), self.entries[i].replacement.as_slice()))
            })
            .collect()
    }

    /// Rewrites `tokens`, replacing leftmost-longest matches left to right.
    pub fn apply<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<String> {
        let mut out = Vec::with_capacity(tokens.len());
        let mut i = 0;
        while i < tokens.len() {
            match self.longest_match(tokens, i) {
                Some((entry, len)) => {
                    out.extend(self.entries[entry].replacement.iter().cloned());
                    i += len;
                }
                None => {
                    out.push(tokens[i].as_ref().to_string());
                    i += 1;
                }
            }
        }
        out
    }

    /// Finds the first leftmost-longest match, returning `(start, len, replacement)`.
    pub fn find_first<S: AsRef<str>>(&self, tokens: &[S]) -> Option<(usize, usize, &[String])> {
        (0..tokens.len()).find_map(|i| {
            self.longest_match(tokens, i)
                .map(|(entry, len)| (i, len, self.entries[entry].replacement.as_slice()))
        })
    }

    /// Every leftmost-longest, non-overlapping match in scan order.
    pub fn find_all<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<(usize, usize, &[String])> {
        let mut hits = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            match self.longest_match(tokens, i) {
                Some((entry, len)) => {
                    hits.push((i, len, self.entries[entry].replacement.as_slice()));
                    i += len;
                }
                None => i += 1,
            }
        }
        hits
    }
}
