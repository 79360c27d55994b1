use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Help,
    NotHelp,
}

impl Label {
    /// Class index used by the softmax output; help is class 1.
    pub fn class(self) -> usize {
        match self {
            Label::Help => 1,
            Label::NotHelp => 0,
        }
    }

    pub fn is_help(self) -> bool {
        self == Label::Help
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HelpKind {
    Generic,
    Skill,
}

/// One line of a dataset file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledQuery {
    pub text: String,
    pub label: Label,
    pub response_id: Option<String>,
    pub skill: Option<String>,
    pub help_kind: Option<HelpKind>,
}

impl LabeledQuery {
    pub fn help(text: impl Into<String>, response_id: impl Into<String>) -> Self {
        LabeledQuery {
            text: text.into(),
            label: Label::Help,
            response_id: Some(response_id.into()),
            skill: None,
            help_kind: None,
        }
    }

    pub fn not_help(text: impl Into<String>) -> Self {
        LabeledQuery {
            text: text.into(),
            label: Label::NotHelp,
            response_id: None,
            skill: None,
            help_kind: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let has_response = self.response_id.as_deref().is_some_and(|r| !r.is_empty());
        if self.label.is_help() && !has_response {
            return Err(Error::Dataset(format!("help query {:?} has no response_id", self.text)));
        }
        Ok(())
    }
}

/// Parses JSON Lines, validating each record.
pub fn read_jsonl(text: &str) -> Result<Vec<LabeledQuery>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let q: LabeledQuery = serde_json::from_str(line)
                .map_err(|e| Error::Dataset(format!("line {}: {e}", i + 1)))?;
            q.validate()?;
            Ok(q)
        })
        .collect()
}

pub fn write_jsonl(data: &[LabeledQuery]) -> Result<String> {
    let mut out = String::new();
    for q in data {
        out.push_str(&serde_json::to_string(q)?);
        out.push('\n');
    }
    Ok(out)
}
