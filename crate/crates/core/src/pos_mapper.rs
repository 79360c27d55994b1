//! Lexicon-driven (action, skill) extraction and response lookup, the
//! rule-based baseline for response retrieval.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::retrieval::ResponseEntry;
use crate::textnorm::{normalize_tokens, parse_pairs, parse_word_list, tsv_rows, NormConfig, PhraseMap};

const ACTIONS_TSV: &str = include_str!("../data/actions.tsv");
const AUXILIARIES_TSV: &str = include_str!("../data/auxiliaries.tsv");
const SKILLS_TSV: &str = include_str!("../data/skills.tsv");
const ACTION_SKILL_TSV: &str = include_str!("../data/action_skill.tsv");
const RESPONSES_TSV: &str = include_str!("../data/responses.tsv");

pub const GENERIC_RESPONSE_ID: &str = "generic_capabilities";

/// Parses `response_id<TAB>response_text`; text keeps its case.
pub fn parse_responses(text: &str) -> Result<Vec<ResponseEntry>> {
    let mut seen = HashSet::new();
    tsv_rows(text)
        .map(|(line, fields)| {
            let bad = |reason: &str| Error::Lexicon {
                file: "responses".into(),
                line,
                reason: reason.into(),
            };
            let [id, text, ..] = fields.as_slice() else {
                return Err(bad("expected response_id<TAB>response_text"));
            };
            let (id, text) = (id.trim(), text.trim());
            if id.is_empty() || text.is_empty() {
                return Err(bad("empty response id or text"));
            }
            if !seen.insert(id.to_string()) {
                return Err(bad("duplicate response id"));
            }
            Ok(ResponseEntry {
                response_id: id.to_string(),
                response_text: text.to_string(),
            })
        })
        .collect()
}

pub fn default_responses() -> Vec<ResponseEntry> {
    parse_responses(RESPONSES_TSV).expect("shipped response table parses")
}

/// `(action, skill) → response_id`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActionSkillTable {
    map: BTreeMap<(String, String), String>,
}

impl ActionSkillTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (line, fields) in tsv_rows(text) {
            let bad = |reason: &str| Error::Lexicon {
                file: "action_skill".into(),
                line,
                reason: reason.into(),
            };
            let [action, skill, id, ..] = fields.as_slice() else {
                return Err(bad("expected action<TAB>skill<TAB>response_id"));
            };
            let key = (action.trim().to_string(), skill.trim().to_string());
            if map.insert(key, id.trim().to_string()).is_some() {
                return Err(bad("duplicate action-skill pair"));
            }
        }
        Ok(ActionSkillTable { map })
    }

    pub fn get(&self, action: &str, skill: &str) -> Option<&str> {
        self.map
            .get(&(action.to_string(), skill.to_string()))
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `(action, skill, response_id)` in sorted order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.map
            .iter()
            .map(|((a, s), id)| (a.as_str(), s.as_str(), id.as_str()))
    }

    /// Actions supported per skill, both sorted.
    pub fn skills(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (a, s, _) in self.entries() {
            out.entry(s).or_default().push(a);
        }
        for actions in out.values_mut() {
            actions.sort_unstable();
        }
        out
    }

    pub fn check_responses(&self, responses: &[ResponseEntry]) -> Result<()> {
        let known: HashSet<&str> = responses.iter().map(|r| r.response_id.as_str()).collect();
        match self.entries().find(|(_, _, id)| !known.contains(id)) {
            Some((a, s, id)) => Err(Error::Dataset(format!(
                "action-skill pair ({a}, {s}) maps to unknown response {id:?}"
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicons {
    actions: PhraseMap,
    auxiliaries: HashSet<String>,
    skills: PhraseMap,
    /// First surface phrase listed for each canonical action and skill.
    action_surface: HashMap<String, String>,
    skill_surface: HashMap<String, String>,
    pub table: ActionSkillTable,
}

/// Normalizes each phrase with the query pipeline so lexicon entries match
/// normalized tokens; rejects phrases that collide with conflicting targets.
fn normalized_pairs(
    pairs: Vec<(String, String)>,
    norm: &NormConfig,
    file: &str,
) -> Result<(Vec<(String, String)>, HashMap<String, String>)> {
    let mut seen: HashMap<String, String> = HashMap::new();
    let mut surface = HashMap::new();
    let mut out = Vec::new();
    for (phrase, canonical) in pairs {
        let tokens = normalize_tokens(&phrase, norm).join(" ");
        if tokens.is_empty() {
            return Err(Error::LexiconEntry {
                file: file.into(),
                reason: format!("{phrase:?} normalizes to nothing"),
            });
        }
        match seen.get(&tokens) {
            Some(prev) if *prev != canonical => {
                return Err(Error::LexiconEntry {
                    file: file.into(),
                    reason: format!("{phrase:?} maps to both {prev} and {canonical}"),
                })
            }
            Some(_) => continue,
            None => {}
        }
        seen.insert(tokens.clone(), canonical.clone());
        surface.entry(canonical.clone()).or_insert_with(|| phrase.clone());
        out.push((tokens, canonical));
    }
    Ok((out, surface))
}

impl Lexicons {
    pub fn from_sources(actions: &str, auxiliaries: &str, skills: &str, table: &str, norm: &NormConfig) -> Result<Self> {
        let (action_pairs, action_surface) = normalized_pairs(parse_pairs(actions, "actions")?, norm, "actions")?;
        let (skill_pairs, skill_surface) = normalized_pairs(parse_pairs(skills, "skills")?, norm, "skills")?;
        let auxiliaries = parse_word_list(auxiliaries)
            .iter()
            .flat_map(|w| normalize_tokens(w, norm))
            .collect();
        let table = ActionSkillTable::parse(table)?;
        let action_names: HashSet<&str> = action_pairs.iter().map(|(_, c)| c.as_str()).collect();
        let skill_names: HashSet<&str> = skill_pairs.iter().map(|(_, c)| c.as_str()).collect();
        if let Some((a, s, _)) = table
            .entries()
            .find(|(a, s, _)| !action_names.contains(a) || !skill_names.contains(s))
        {
            return Err(Error::Dataset(format!(
                "action-skill table pair ({a}, {s}) is not covered by the lexicons"
            )));
        }
        Ok(Lexicons {
            actions: PhraseMap::new(action_pairs),
            auxiliaries,
            skills: PhraseMap::new(skill_pairs),
            action_surface,
            skill_surface,
            table,
        })
    }

    pub fn default_with(norm: &NormConfig) -> Result<Self> {
        Self::from_sources(ACTIONS_TSV, AUXILIARIES_TSV, SKILLS_TSV, ACTION_SKILL_TSV, norm)
    }

    /// Shipped lexicons under the default normalization.
    pub fn shipped() -> Self {
        Self::default_with(&NormConfig::default()).expect("shipped lexicons load")
    }

    pub fn is_auxiliary(&self, token: &str) -> bool {
        self.auxiliaries.contains(token)
    }

    pub fn action_phrases(&self) -> impl Iterator<Item = String> + '_ {
        self.actions.phrases()
    }

    pub fn skill_names(&self) -> BTreeSet<String> {
        self.skills.replacements().map(|r| r.join(" ")).collect()
    }

    /// A sample help query for a skill, built from the first listed phrases.
    pub fn sample_query(&self, action: &str, skill: &str) -> String {
        let verb = self.action_surface.get(action).map_or(action, String::as_str);
        let noun = self.skill_surface.get(skill).map_or(skill, String::as_str);
        format!("how do i {verb} {noun}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSkill {
    pub action: Option<String>,
    pub skill: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosOutcome {
    Mapped,
    MissingAction,
    MissingSkill,
    MissingBoth,
    UnsupportedPair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosResult {
    pub action: Option<String>,
    pub skill: Option<String>,
    pub response_id: Option<String>,
    pub outcome: PosOutcome,
}

/// Extracts the first skill phrase (scanning left to right) and an action.
///
/// Action candidates are every action phrase occurring in the query that is
/// not made only of auxiliaries, ordered leftmost then longest. The first
/// candidate forming a supported pair with the skill wins; otherwise the
/// first candidate is reported. Padding never appears in a lexicon.
pub fn extract_action_skill<S: AsRef<str>>(tokens: &[S], lex: &Lexicons) -> ActionSkill {
    let skill = lex
        .skills
        .find_first(tokens)
        .map(|(_, _, canonical)| canonical.join(" "));
    let mut candidates = Vec::new();
    for start in 0..tokens.len() {
        for (len, canonical) in lex.actions.matches_at(tokens, start) {
            let aux_only = tokens[start..start + len]
                .iter()
                .all(|t| lex.is_auxiliary(t.as_ref()));
            if !aux_only {
                candidates.push(canonical.join(" "));
            }
        }
    }
    let supported = skill.as_deref().and_then(|s| {
        candidates
            .iter()
            .find(|a| lex.table.get(a, s).is_some())
            .cloned()
    });
    let action = supported.or_else(|| candidates.into_iter().next());
    ActionSkill { action, skill }
}

pub fn map_response<'a>(pair: &ActionSkill, table: &'a ActionSkillTable) -> Option<&'a str> {
    match (&pair.action, &pair.skill) {
        (Some(a), Some(s)) => table.get(a, s),
        _ => None,
    }
}

/// Runs the baseline on normalized tokens.
pub fn answer_tokens<S: AsRef<str>>(tokens: &[S], lex: &Lexicons) -> PosResult {
    let pair = extract_action_skill(tokens, lex);
    let response_id = map_response(&pair, &lex.table).map(str::to_string);
    let outcome = match (&pair.action, &pair.skill, &response_id) {
        (_, _, Some(_)) => PosOutcome::Mapped,
        (None, None, _) => PosOutcome::MissingBoth,
        (None, Some(_), _) => PosOutcome::MissingAction,
        (Some(_), None, _) => PosOutcome::MissingSkill,
        (Some(_), Some(_), None) => PosOutcome::UnsupportedPair,
    };
    PosResult {
        action: pair.action,
        skill: pair.skill,
        response_id,
        outcome,
    }
}

/// Normalizes raw text and runs the baseline.
pub fn answer(raw: &str, lex: &Lexicons, norm: &NormConfig) -> PosResult {
    answer_tokens(&normalize_tokens(raw, norm), lex)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_tables_are_consistent() {
        let lex = Lexicons::shipped();
        assert_eq!(lex.skill_names().len(), 24);
        lex.table.check_responses(&default_responses()).unwrap();
        assert!(default_responses().iter().any(|r| r.response_id == GENERIC_RESPONSE_ID));
    }

    #[test]
    fn lexicon_phrases_are_normalized() {
        let norm = NormConfig::default();
        let lex = Lexicons::shipped();
        for p in lex.action_phrases() {
            assert_eq!(normalize_tokens(&p, &norm).join(" "), p);
        }
    }

    #[test]
    fn auxiliary_only_actions_are_skipped() {
        let norm = NormConfig::default();
        let lex = Lexicons::from_sources(
            "help\thelp\ncreate\tcreate\n",
            "help\n",
            "alarm\talarm\n",
            "create\talarm\tcreate_alarm\n",
            &norm,
        )
        .unwrap();
        let r = answer("help me create an alarm", &lex, &norm);
        assert_eq!(r.action.as_deref(), Some("create"));
        assert_eq!(r.response_id.as_deref(), Some("create_alarm"));
    }

    #[test]
    fn conflicting_phrases_rejected() {
        let norm = NormConfig::default();
        let err = Lexicons::from_sources("set\tcreate\nsets\tdelete\n", "", "alarm\talarm\n", "", &norm);
        assert!(matches!(err, Err(Error::LexiconEntry { .. })));
    }

    #[test]
    fn table_lookup() {
        let lex = Lexicons::shipped();
        assert_eq!(lex.table.get("create", "alarm"), Some("create_alarm"));
        assert_eq!(lex.table.get("sync", "tv"), None);
        let only_skill = ActionSkill {
            action: None,
            skill: Some("alarm".into()),
        };
        assert_eq!(map_response(&only_skill, &lex.table), None);
    }

    #[test]
    fn multiword_phrases_win() {
        let norm = NormConfig::default();
        let lex = Lexicons::shipped();
        let r = answer("how do i turn off the smart tv", &lex, &norm);
        assert_eq!(r.action.as_deref(), Some("turn_off"));
        assert_eq!(r.skill.as_deref(), Some("tv"));
        assert_eq!(r.outcome, PosOutcome::Mapped);
    }
}
