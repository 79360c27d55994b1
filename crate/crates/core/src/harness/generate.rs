//! Seeded synthetic corpus generation and train/validation/test splitting.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::templates::{SkillTemplate, COMMANDS, DESK_SKILLS, FILLERS, GENERIC_HELP, OTHER, SKILLS, SKILL_INFO, TASK_HELP};
use crate::error::{Error, Result};
use crate::models::{HelpKind, LabeledQuery};
use crate::pos_mapper::GENERIC_RESPONSE_ID;

pub const DEFAULT_DATASET_SIZE: usize = 5_000;
pub const FULL_DATASET_SIZE: usize = 200_000;
pub const DEFAULT_FRACTIONS: [f64; 3] = [0.80, 0.05, 0.15];
const MAX_ATTEMPTS: usize = 500;

/// Templates a corpus is generated from.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub skills: Vec<SkillTemplate>,
    pub task_help: Vec<&'static str>,
    pub skill_info: Vec<&'static str>,
    pub generic_help: Vec<&'static str>,
    pub commands: Vec<&'static str>,
    pub other: Vec<&'static str>,
}

impl TemplateSet {
    /// All 24 skills.
    pub fn full() -> Self {
        TemplateSet {
            skills: SKILLS.to_vec(),
            task_help: TASK_HELP.to_vec(),
            skill_info: SKILL_INFO.to_vec(),
            generic_help: GENERIC_HELP.to_vec(),
            commands: COMMANDS.to_vec(),
            other: OTHER.to_vec(),
        }
    }

    /// The eight most frequent skills.
    pub fn desk() -> Self {
        Self::full().only(DESK_SKILLS)
    }

    pub fn only(mut self, skills: &[&str]) -> Self {
        self.skills.retain(|s| skills.contains(&s.skill));
        self
    }

    pub fn default_weights(&self) -> Vec<f64> {
        self.skills.iter().map(|s| s.weight).collect()
    }

    /// Every response id a generated help query can carry.
    pub fn response_ids(&self) -> Vec<String> {
        let mut ids = vec![GENERIC_RESPONSE_ID.to_string()];
        for s in &self.skills {
            ids.push(s.about_response_id());
            ids.extend(s.tasks.iter().map(|t| s.response_id(t)));
        }
        ids
    }
}

/// Proportions of the generated corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub help_fraction: f64,
    /// Shares of help queries that are generic or ask about a skill; the
    /// rest ask about a task.
    pub generic_fraction: f64,
    pub skill_info_fraction: f64,
    /// Share of not-help queries that are skill commands; the rest are
    /// chit-chat and factual questions.
    pub command_fraction: f64,
    pub typo_rate: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            help_fraction: 0.5,
            generic_fraction: 0.08,
            skill_info_fraction: 0.12,
            command_fraction: 0.6,
            typo_rate: 0.08,
        }
    }
}

fn fill_slots(template: &str, rng: &mut ChaCha8Rng) -> String {
    let mut out = template.to_string();
    // Fillers may themselves hold slots ("some {genre}").
    for _ in 0..4 {
        let Some(open) = out.find('{') else { break };
        let Some(len) = out[open..].find('}') else { break };
        let name = &out[open + 1..open + len];
        let value = FILLERS
            .iter()
            .find(|(slot, _)| *slot == name)
            .and_then(|(_, values)| values.choose(rng))
            .copied()
            .unwrap_or("");
        out.replace_range(open..=open + len, value);
    }
    out
}

fn substitute(template: &str, verb: &str, noun: &str, tail: &str) -> String {
    template
        .replace("{verb}", verb)
        .replace("{noun}", noun)
        .replace("{tail}", tail)
}

/// Swaps, drops or doubles one letter of one longer word.
fn add_typo(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut words: Vec<String> = text.split(' ').map(str::to_string).collect();
    let candidates: Vec<usize> = (0..words.len())
        .filter(|&i| words[i].len() >= 4 && words[i].chars().all(|c| c.is_ascii_lowercase()))
        .collect();
    let Some(&w) = candidates.choose(rng) else {
        return text.to_string();
    };
    let mut chars: Vec<char> = words[w].chars().collect();
    let i = rng.random_range(1..chars.len() - 1);
    match rng.random_range(0..3) {
        0 => chars.swap(i, i + 1),
        1 => {
            chars.remove(i);
        }
        _ => chars.insert(i, chars[i]),
    }
    words[w] = chars.into_iter().collect();
    words.join(" ")
}

fn surface(text: &str, question: bool, rng: &mut ChaCha8Rng) -> String {
    let mut s = text.split_whitespace().collect::<Vec<_>>().join(" ");
    if rng.random_bool(0.3) {
        let mut c = s.chars();
        if let Some(first) = c.next() {
            s = first.to_uppercase().chain(c).collect();
        }
    }
    if question && rng.random_bool(0.5) {
        s.push('?');
    } else if rng.random_bool(0.15) {
        s.push('.');
    }
    s
}

enum Kind {
    Generic,
    SkillInfo,
    Task,
    Command,
    Other,
}

fn draw(
    kind: &Kind,
    skill: &SkillTemplate,
    set: &TemplateSet,
    cfg: &GeneratorConfig,
    rng: &mut ChaCha8Rng,
) -> LabeledQuery {
    let task = skill.tasks.choose(rng).expect("skills have tasks");
    let verb = *task.verbs.choose(rng).expect("tasks have verbs");
    let noun = *skill.nouns.choose(rng).expect("skills have nouns");
    let tail = *task.tails.choose(rng).unwrap_or(&"");
    let (text, question) = match kind {
        Kind::Generic => (set.generic_help.choose(rng).unwrap().to_string(), true),
        Kind::SkillInfo => (substitute(set.skill_info.choose(rng).unwrap(), verb, noun, tail), true),
        Kind::Task => (substitute(set.task_help.choose(rng).unwrap(), verb, noun, tail), true),
        Kind::Command => (substitute(set.commands.choose(rng).unwrap(), verb, noun, tail), false),
        Kind::Other => (set.other.choose(rng).unwrap().to_string(), false),
    };
    let mut text = fill_slots(&text, rng);
    if rng.random_bool(cfg.typo_rate) {
        text = add_typo(&text, rng);
    }
    let text = surface(&text, question, rng);
    match kind {
        Kind::Generic => LabeledQuery {
            help_kind: Some(HelpKind::Generic),
            ..LabeledQuery::help(text, GENERIC_RESPONSE_ID)
        },
        Kind::SkillInfo => LabeledQuery {
            skill: Some(skill.skill.to_string()),
            help_kind: Some(HelpKind::Skill),
            ..LabeledQuery::help(text, skill.about_response_id())
        },
        Kind::Task => LabeledQuery {
            skill: Some(skill.skill.to_string()),
            help_kind: Some(HelpKind::Skill),
            ..LabeledQuery::help(text, skill.response_id(task))
        },
        Kind::Command => LabeledQuery {
            skill: Some(skill.skill.to_string()),
            ..LabeledQuery::not_help(text)
        },
        Kind::Other => LabeledQuery::not_help(text),
    }
}

/// Generates `n` distinct labeled queries.
///
/// Skills are drawn by `weights` (aligned with `set.skills`); each query then
/// resamples its template until the text is new, so duplicates never bias
/// the skill distribution.
pub fn generate_dataset(
    set: &TemplateSet,
    n: usize,
    weights: &[f64],
    cfg: &GeneratorConfig,
    seed: u64,
) -> Result<Vec<LabeledQuery>> {
    if set.skills.is_empty() || set.task_help.is_empty() || set.commands.is_empty() {
        return Err(Error::Dataset("template set is empty".into()));
    }
    if n == 0 {
        return Err(Error::Dataset("dataset size must be at least 1".into()));
    }
    if weights.len() != set.skills.len() {
        return Err(Error::DimensionMismatch {
            expected: set.skills.len(),
            found: weights.len(),
        });
    }
    let skill_dist = WeightedIndex::new(weights)
        .map_err(|e| Error::InvalidConfig(format!("skill weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let kind = if rng.random_bool(cfg.help_fraction) {
            let r: f64 = rng.random();
            if r < cfg.generic_fraction {
                Kind::Generic
            } else if r < cfg.generic_fraction + cfg.skill_info_fraction {
                Kind::SkillInfo
            } else {
                Kind::Task
            }
        } else if rng.random_bool(cfg.command_fraction) {
            Kind::Command
        } else {
            Kind::Other
        };
        let skill = &set.skills[skill_dist.sample(&mut rng)];
        let mut attempts = 0;
        loop {
            let q = draw(&kind, skill, set, cfg, &mut rng);
            if seen.insert(q.text.clone()) {
                out.push(q);
                break;
            }
            attempts += 1;
            if attempts == MAX_ATTEMPTS {
                // This category is exhausted for this skill; draw another.
                break;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<LabeledQuery>,
    pub validation: Vec<LabeledQuery>,
    pub test: Vec<LabeledQuery>,
    pub seed: u64,
}

/// Seeded shuffle, then contiguous train/validation/test slices. Validation
/// and test sizes are rounded down; the remainder goes to train.
pub fn split_dataset(data: &[LabeledQuery], fractions: [f64; 3], seed: u64) -> Result<DatasetSplit> {
    if data.len() < 3 {
        return Err(Error::Dataset(format!("need at least 3 items to split, got {}", data.len())));
    }
    if fractions.iter().any(|&f| !(f > 0.0)) || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "split fractions must be positive and sum to 1, got {fractions:?}"
        )));
    }
    let mut shuffled = data.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n = data.len() as f64;
    // The epsilon keeps exact products such as 100 × 0.05 from flooring to 4.
    let n_val = (n * fractions[1] + 1e-9).floor() as usize;
    let n_test = (n * fractions[2] + 1e-9).floor() as usize;
    let n_train = data.len() - n_val - n_test;
    let test = shuffled.split_off(n_train + n_val);
    let validation = shuffled.split_off(n_train);
    Ok(DatasetSplit {
        train: shuffled,
        validation,
        test,
        seed,
    })
}
