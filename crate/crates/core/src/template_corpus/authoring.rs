//! Derives the shipped corpus from hand-written base templates.
//!
//! Each base receives a fixed number of variations so that per-capability
//! totals match a [`CorpusManifest`]. Variations are produced by
//! [`apply_variation`] from a vocabulary of interchangeable phrases
//! (temporal order, negation, beneficial effect) or of connectives
//! (positive sentiment), enumerated in a fixed order: single edits first,
//! then pairs, and so on.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::variation::phrase_matches;
use super::{apply_variation, variation_id, CorpusManifest, Template, VariationError, VariationRule};
use crate::types::CapabilityKind;

/// Interchangeable phrases used to author variations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariationVocabulary {
    /// Each group lists phrases that may replace one another. Phrases may
    /// contain a placeholder to anchor them, e.g. `"experienced {ade}"`.
    pub swap_groups: Vec<Vec<String>>,
    /// Sentence-initial connectives for positive-sentiment templates.
    pub conjunctions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuthoringError {
    #[error("{capability}: manifest expects {expected} base templates, found {found}")]
    BaseCount {
        capability: CapabilityKind,
        expected: usize,
        found: usize,
    },
    #[error("{base_id}: needs {needed} variations but only {available} distinct ones exist")]
    NotEnoughVariations {
        base_id: String,
        needed: usize,
        available: usize,
    },
    #[error("{base_id}: {source}")]
    Variation {
        base_id: String,
        #[source]
        source: VariationError,
    },
}

/// Builds the full corpus: every base followed by its variations.
pub fn author_corpus(
    bases: &[Template],
    vocabulary: &VariationVocabulary,
    manifest: &CorpusManifest,
) -> Result<Vec<Template>, AuthoringError> {
    let mut per_base = Vec::with_capacity(bases.len());
    for row in &manifest.rows {
        let of_cap: Vec<&Template> = bases
            .iter()
            .filter(|b| b.capability.kind == row.capability)
            .collect();
        if of_cap.len() != row.base {
            return Err(AuthoringError::BaseCount {
                capability: row.capability,
                expected: row.base,
                found: of_cap.len(),
            });
        }
        let extra = row.total.saturating_sub(row.base);
        for (i, base) in of_cap.into_iter().enumerate() {
            // The first `extra % n` bases take one more variation.
            let n = extra / row.base + usize::from(i < extra % row.base);
            per_base.push((base, n));
        }
    }

    let mut corpus = Vec::new();
    for base in bases {
        let n = per_base
            .iter()
            .find(|(b, _)| b.id == base.id)
            .map_or(0, |(_, n)| *n);
        corpus.push(base.clone());
        corpus.extend(variations_of(base, vocabulary, n)?);
    }
    Ok(corpus)
}

fn variations_of(
    base: &Template,
    vocabulary: &VariationVocabulary,
    needed: usize,
) -> Result<Vec<Template>, AuthoringError> {
    let rules = if base.capability.kind == CapabilityKind::PositiveSentiment {
        conjunction_rules(base, &vocabulary.conjunctions)
    } else {
        swap_rules(base, &vocabulary.swap_groups)
    };

    let mut seen: HashSet<String> = HashSet::from([base.text.clone()]);
    let mut out = Vec::with_capacity(needed);
    let mut available = 0;
    for rule in rules {
        let id = variation_id(&base.id, out.len() + 1);
        let v = match apply_variation(base, &rule, id) {
            Ok(v) => v,
            Err(VariationError::TargetAbsent(_)) => continue,
            Err(source) => {
                return Err(AuthoringError::Variation {
                    base_id: base.id.clone(),
                    source,
                })
            }
        };
        if seen.insert(v.text.clone()) {
            available += 1;
            if out.len() < needed {
                out.push(v);
            }
        }
    }
    if out.len() < needed {
        return Err(AuthoringError::NotEnoughVariations {
            base_id: base.id.clone(),
            needed,
            available,
        });
    }
    Ok(out)
}

fn present<'a>(text: &str, phrases: &'a [String]) -> Option<&'a String> {
    phrases
        .iter()
        .find(|p| phrase_matches(text, p).is_ok_and(|m| !m.is_empty()))
}

fn conjunction_rules(base: &Template, conjunctions: &[String]) -> Vec<VariationRule> {
    let Some(current) = present(&base.text, conjunctions) else {
        return Vec::new();
    };
    conjunctions
        .iter()
        .filter(|c| *c != current)
        .map(|c| VariationRule::ExchangeConjunction {
            from: current.clone(),
            to: c.clone(),
        })
        .chain(std::iter::once(VariationRule::RemoveConjunction {
            conjunction: current.clone(),
        }))
        .collect()
}

fn swap_rules(base: &Template, groups: &[Vec<String>]) -> Vec<VariationRule> {
    // (current phrase, alternatives) for every group present in the text.
    let axes: Vec<(&String, Vec<&String>)> = groups
        .iter()
        .filter_map(|g| {
            let cur = present(&base.text, g)?;
            Some((cur, g.iter().filter(|p| *p != cur).collect()))
        })
        .collect();

    // Mixed-radix enumeration; digit 0 keeps the current phrase.
    let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
    for (_, alts) in &axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                (0..=alts.len()).map(move |d| {
                    let mut c = c.clone();
                    c.push(d);
                    c
                })
            })
            .collect();
    }
    combos.retain(|c| c.iter().any(|&d| d != 0));
    combos.sort_by_key(|c| (c.iter().filter(|&&d| d != 0).count(), c.clone()));

    combos
        .into_iter()
        .map(|c| {
            let swaps = c
                .iter()
                .zip(&axes)
                .filter(|(&d, _)| d != 0)
                .map(|(&d, (cur, alts))| VariationRule::swap(cur, alts[d - 1]))
                .collect();
            VariationRule::Sequence(swaps)
        })
        .collect()
}
