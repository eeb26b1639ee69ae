use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::gerund::{ava_gerund_table, gerundize};
use super::PromptError;
use crate::ava_data::{ActionId, ActionVocabulary};
use crate::Strictness;

pub const PLACEHOLDER: &str = "{action}";
pub const DEFAULT_PATTERN: &str = "is someone {action}?";

/// How a class name becomes a question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pattern: String,
    overrides: BTreeMap<String, String>,
    gerund_overrides: BTreeMap<String, String>,
}

impl PromptTemplate {
    /// A template with the shipped AVA gerund table.
    pub fn new(pattern: impl Into<String>) -> Result<Self, PromptError> {
        let pattern = pattern.into();
        if pattern.matches(PLACEHOLDER).count() != 1 {
            return Err(PromptError::Placeholder(pattern));
        }
        if !pattern.ends_with('?') {
            return Err(PromptError::MissingQuestionMark(pattern));
        }
        Ok(Self {
            pattern,
            overrides: BTreeMap::new(),
            gerund_overrides: ava_gerund_table(),
        })
    }

    /// Uses `question` verbatim for the class named `class_name`.
    pub fn with_override(
        mut self,
        class_name: impl Into<String>,
        question: impl Into<String>,
    ) -> Result<Self, PromptError> {
        let question = question.into();
        if !question.ends_with('?') {
            return Err(PromptError::MissingQuestionMark(question));
        }
        self.overrides.insert(class_name.into(), question);
        Ok(self)
    }

    pub fn with_gerund(mut self, verb: impl Into<String>, gerund: impl Into<String>) -> Self {
        self.gerund_overrides.insert(verb.into(), gerund.into());
        self
    }

    /// Drops the shipped gerund table so only the spelling rules and
    /// explicitly added gerunds apply.
    pub fn without_builtin_gerunds(mut self) -> Self {
        self.gerund_overrides.clear();
        self
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn overrides(&self) -> &BTreeMap<String, String> {
        &self.overrides
    }

    pub fn gerund_overrides(&self) -> &BTreeMap<String, String> {
        &self.gerund_overrides
    }

    /// `(prefix, suffix)` around the placeholder.
    pub fn affixes(&self) -> (&str, &str) {
        self.pattern
            .split_once(PLACEHOLDER)
            .expect("pattern validated to contain the placeholder")
    }

    pub fn question_for(&self, class_name: &str) -> Result<String, PromptError> {
        if let Some(q) = self.overrides.get(class_name) {
            return Ok(q.clone());
        }
        let gerund = gerundize(class_name, &self.gerund_overrides)?;
        Ok(self.pattern.replacen(PLACEHOLDER, &gerund, 1))
    }
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self::new(DEFAULT_PATTERN).expect("default pattern is valid")
    }
}

/// One question per action class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBank {
    entries: BTreeMap<ActionId, String>,
    pattern: String,
}

impl PromptBank {
    pub fn entries(&self) -> &BTreeMap<ActionId, String> {
        &self.entries
    }

    pub fn question(&self, id: ActionId) -> Option<&str> {
        self.entries.get(&id).map(String::as_str)
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `action_id,question` rows in ascending id order.
    pub fn to_csv(&self) -> Result<String, PromptError> {
        let mut out = String::new();
        for (id, q) in &self.entries {
            if q.contains(',') {
                return Err(PromptError::CommaInQuestion {
                    action: *id,
                    question: q.clone(),
                });
            }
            let _ = writeln!(out, "{id},{q}");
        }
        Ok(out)
    }

    /// Reads back [`to_csv`](Self::to_csv) output. The pattern is not part
    /// of the file and must be supplied.
    pub fn from_csv(text: &str, pattern: impl Into<String>) -> Result<Self, PromptError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let bad = || PromptError::BankLine {
                line: i + 1,
                text: line.to_string(),
            };
            let (id, q) = line.split_once(',').ok_or_else(bad)?;
            let id: u32 = id.parse().map_err(|_| bad())?;
            if q.is_empty() || q.contains(',') || !q.ends_with('?') {
                return Err(bad());
            }
            if entries.insert(ActionId(id), q.to_string()).is_some() {
                return Err(bad());
            }
        }
        Ok(Self {
            entries,
            pattern: pattern.into(),
        })
    }
}

/// Builds the question bank for a vocabulary.
///
/// Full-question overrides take precedence; every other class gets the
/// pattern with its gerundized name. Overrides naming classes absent from
/// the vocabulary are an error in strict mode and a returned warning
/// otherwise. Fails if two classes would receive the same question.
pub fn build_prompt_bank(
    vocab: &ActionVocabulary,
    template: &PromptTemplate,
    strictness: Strictness,
) -> Result<(PromptBank, Vec<String>), PromptError> {
    let mut warnings = Vec::new();
    for name in template.overrides.keys() {
        if vocab.by_name(name).is_none() {
            if strictness == Strictness::Strict {
                return Err(PromptError::UnknownOverride(name.clone()));
            }
            warnings.push(format!("override for {name:?} matches no vocabulary class"));
        }
    }

    let mut entries = BTreeMap::new();
    let mut seen: HashMap<String, ActionId> = HashMap::with_capacity(vocab.len());
    for class in vocab {
        let q = template.question_for(class.name())?;
        if let Some(&first) = seen.get(&q) {
            return Err(PromptError::DuplicateQuestion {
                question: q,
                first,
                second: class.id(),
            });
        }
        seen.insert(q.clone(), class.id());
        entries.insert(class.id(), q);
    }
    Ok((
        PromptBank {
            entries,
            pattern: template.pattern.clone(),
        },
        warnings,
    ))
}
