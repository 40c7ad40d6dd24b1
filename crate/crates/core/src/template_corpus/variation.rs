use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{segments, PlaceholderError, Segment, Template};
use crate::types::CapabilityKind;

/// An edit that derives a variation from a base template.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum VariationRule {
    Identity,
    /// Vocabulary substitution of every whole-phrase occurrence of `from`.
    Swap { from: String, to: String },
    /// Replace the connective between two phrases.
    ExchangeConjunction { from: String, to: String },
    /// Drop the connective (and the whitespace after it).
    RemoveConjunction { conjunction: String },
    Sequence(Vec<VariationRule>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VariationError {
    #[error("{0:?} does not occur in the template text")]
    TargetAbsent(String),
    #[error("rule changes the placeholder multiset")]
    PlaceholderChange,
    #[error("{rule} rules do not apply to {capability} templates")]
    NotApplicable {
        rule: &'static str,
        capability: CapabilityKind,
    },
    #[error("template {0:?} is a variation, not a base template")]
    NotABase(String),
    #[error(transparent)]
    Placeholder(#[from] PlaceholderError),
}

impl VariationRule {
    pub fn swap(from: &str, to: &str) -> Self {
        VariationRule::Swap {
            from: from.into(),
            to: to.into(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            VariationRule::Identity => "identity",
            VariationRule::Swap { .. } => "vocabulary",
            VariationRule::ExchangeConjunction { .. } | VariationRule::RemoveConjunction { .. } => {
                "conjunction"
            }
            VariationRule::Sequence(_) => "sequence",
        }
    }

    fn check_applies(&self, capability: CapabilityKind) -> Result<(), VariationError> {
        let ok = match self {
            VariationRule::Identity => true,
            VariationRule::Swap { .. } => capability != CapabilityKind::PositiveSentiment,
            VariationRule::ExchangeConjunction { .. } | VariationRule::RemoveConjunction { .. } => {
                capability == CapabilityKind::PositiveSentiment
            }
            VariationRule::Sequence(rules) => {
                return rules.iter().try_for_each(|r| r.check_applies(capability))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(VariationError::NotApplicable {
                rule: self.name(),
                capability,
            })
        }
    }

    fn edit(&self, text: &str) -> Result<String, VariationError> {
        match self {
            VariationRule::Identity => Ok(text.to_string()),
            VariationRule::Swap { from, to } => {
                let hits = phrase_matches(text, from)?;
                if hits.is_empty() {
                    return Err(VariationError::TargetAbsent(from.clone()));
                }
                let mut out = String::with_capacity(text.len());
                let mut last = 0;
                for r in hits {
                    out.push_str(&text[last..r.start]);
                    out.push_str(to);
                    last = r.end;
                }
                out.push_str(&text[last..]);
                Ok(out)
            }
            VariationRule::ExchangeConjunction { from, to } => {
                let hit = first_match(text, from)?;
                Ok(format!("{}{}{}", &text[..hit.start], to, &text[hit.end..]))
            }
            VariationRule::RemoveConjunction { conjunction } => {
                let hit = first_match(text, conjunction)?;
                let rest = text[hit.end..].trim_start();
                let sentence_initial = conjunction.chars().next().is_some_and(char::is_uppercase);
                let mut out = text[..hit.start].to_string();
                let mut chars = rest.chars();
                match chars.next() {
                    Some(c) if sentence_initial && c.is_lowercase() => {
                        out.extend(c.to_uppercase());
                        out.push_str(chars.as_str());
                    }
                    _ => out.push_str(rest),
                }
                Ok(out)
            }
            VariationRule::Sequence(rules) => rules.iter().try_fold(text.to_string(), |t, r| r.edit(&t)),
        }
    }
}

fn first_match(text: &str, phrase: &str) -> Result<Range<usize>, VariationError> {
    phrase_matches(text, phrase)?
        .into_iter()
        .next()
        .ok_or_else(|| VariationError::TargetAbsent(phrase.to_string()))
}

/// Non-overlapping whole-phrase occurrences of `phrase` that do not cut
/// through a placeholder token.
pub(crate) fn phrase_matches(text: &str, phrase: &str) -> Result<Vec<Range<usize>>, PlaceholderError> {
    if phrase.is_empty() {
        return Ok(Vec::new());
    }
    let placeholders: Vec<Range<usize>> = segments(text)?
        .into_iter()
        .filter_map(|s| match s {
            Segment::Placeholder(_, r) => Some(r),
            Segment::Literal(_) => None,
        })
        .collect();
    let cuts = |pos: usize| placeholders.iter().any(|p| p.start < pos && pos < p.end);
    let word = |c: Option<char>| c.is_some_and(char::is_alphanumeric);
    let first_is_word = word(phrase.chars().next());
    let last_is_word = word(phrase.chars().next_back());

    let mut out = Vec::new();
    let mut from = 0;
    while let Some(off) = text[from..].find(phrase) {
        let start = from + off;
        let end = start + phrase.len();
        let before_ok = !first_is_word || !word(text[..start].chars().next_back());
        let after_ok = !last_is_word || !word(text[end..].chars().next());
        if before_ok && after_ok && !cuts(start) && !cuts(end) {
            out.push(start..end);
            from = end;
        } else {
            from = start + text[start..].chars().next().map_or(1, char::len_utf8);
        }
    }
    Ok(out)
}

/// Derives a variation of `base` under `rule`, with the given fresh id.
pub fn apply_variation(
    base: &Template,
    rule: &VariationRule,
    id: impl Into<String>,
) -> Result<Template, VariationError> {
    if !base.is_base() {
        return Err(VariationError::NotABase(base.id.clone()));
    }
    rule.check_applies(base.capability.kind)?;
    let text = rule.edit(&base.text)?;
    let t = Template::new(id, base.id.clone(), base.capability, base.label, text)?;
    if t.placeholder_multiset() != base.placeholder_multiset() {
        return Err(VariationError::PlaceholderChange);
    }
    Ok(t)
}
