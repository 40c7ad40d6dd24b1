//! Short-noun-phrase filtering of POS-tagged ADE mentions.
//!
//! Spans arrive pre-tagged, one per line as `surface_TAG` tokens. A span is
//! kept when its whole tag sequence equals one of the configured tagsets.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_MAX_LEN: usize = 7;

/// Coarse part-of-speech tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    Noun,
    Propn,
    Adj,
    Det,
    Adp,
    Pron,
    Verb,
    Num,
    Punct,
    Sym,
    Other,
}

impl PosTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Noun => "NOUN",
            PosTag::Propn => "PROPN",
            PosTag::Adj => "ADJ",
            PosTag::Det => "DET",
            PosTag::Adp => "ADP",
            PosTag::Pron => "PRON",
            PosTag::Verb => "VERB",
            PosTag::Num => "NUM",
            PosTag::Punct => "PUNCT",
            PosTag::Sym => "SYM",
            PosTag::Other => "OTHER",
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractionError {
    #[error("unknown POS tag {0:?}")]
    UnknownTag(String),
    #[error("line {line}: token {token:?} has no `_TAG` suffix")]
    MissingTag { line: usize, token: String },
    #[error("line {line}: {source}")]
    Tag {
        line: usize,
        #[source]
        source: Box<ExtractionError>,
    },
    #[error("line {line}: tagset length {len} outside 1..=7")]
    RuleLength { line: usize, len: usize },
}

impl FromStr for PosTag {
    type Err = ExtractionError;

    /// Accepts the coarse tags plus the remaining universal tags, which fold
    /// into `OTHER`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "NOUN" => PosTag::Noun,
            "PROPN" => PosTag::Propn,
            "ADJ" => PosTag::Adj,
            "DET" => PosTag::Det,
            "ADP" => PosTag::Adp,
            "PRON" => PosTag::Pron,
            "VERB" => PosTag::Verb,
            "NUM" => PosTag::Num,
            "PUNCT" => PosTag::Punct,
            "SYM" => PosTag::Sym,
            "OTHER" | "ADV" | "AUX" | "CCONJ" | "INTJ" | "PART" | "SCONJ" | "X" => PosTag::Other,
            _ => return Err(ExtractionError::UnknownTag(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub pos: PosTag,
}

/// A tagged ADE mention. Never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSpan {
    tokens: Vec<Token>,
}

impl TaggedSpan {
    /// `None` for an empty token list.
    pub fn new(tokens: Vec<Token>) -> Option<Self> {
        (!tokens.is_empty()).then_some(TaggedSpan { tokens })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, PosTag)>) -> Option<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(s, pos)| Token { surface: s.to_string(), pos })
                .collect(),
        )
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tags(&self) -> Vec<PosTag> {
        self.tokens.iter().map(|t| t.pos).collect()
    }

    /// Surface tokens joined by single spaces.
    pub fn surface(&self) -> String {
        let words: Vec<&str> = self.tokens.iter().map(|t| t.surface.as_str()).collect();
        words.join(" ")
    }

    /// Inverse of the span-file line format.
    pub fn to_line(&self) -> String {
        let toks: Vec<String> = self.tokens.iter().map(|t| format!("{}_{}", t.surface, t.pos)).collect();
        toks.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TagSetRule {
    pattern: Vec<PosTag>,
}

impl TagSetRule {
    pub const MAX_LEN: usize = 7;

    /// `None` unless `1 <= pattern.len() <= 7`.
    pub fn new(pattern: Vec<PosTag>) -> Option<Self> {
        (1..=Self::MAX_LEN).contains(&pattern.len()).then_some(TagSetRule { pattern })
    }

    pub fn pattern(&self) -> &[PosTag] {
        &self.pattern
    }

    pub fn matches(&self, tags: &[PosTag]) -> bool {
        self.pattern == tags
    }
}

impl fmt::Display for TagSetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tags: Vec<&str> = self.pattern.iter().map(|t| t.as_str()).collect();
        f.write_str(&tags.join(" "))
    }
}

/// The shipped rules: the smallest list accepting the documented examples.
pub fn default_tagsets() -> Vec<TagSetRule> {
    use PosTag::*;
    [
        vec![Noun],
        vec![Adj, Noun],
        vec![Noun, Adp, Noun],
        vec![Noun, Adp, Adj, Noun],
        vec![Adj, Noun, Adp, Pron, Adj, Noun],
    ]
    .into_iter()
    .map(|p| TagSetRule::new(p).expect("static rule lengths are valid"))
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RejectReason {
    /// Contains a PUNCT or SYM token.
    #[serde(rename = "punct/sym")]
    PunctSym,
    /// Longer than `max_len` or than every rule, so no rule can match.
    #[serde(rename = "too-long")]
    TooLong,
    /// No rule matches the tag sequence.
    #[serde(rename = "not-NP")]
    NotNp,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::PunctSym => "punct/sym",
            RejectReason::TooLong => "too-long",
            RejectReason::NotNp => "not-NP",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    /// Zero-based position in the input.
    pub index: usize,
    pub surface: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Extraction {
    pub accepted: Vec<String>,
    pub rejected: Vec<Rejection>,
}

/// Why `span` fails the filter, if it does. Checks run in the order
/// punct/sym, too-long, not-NP.
pub fn classify_span(span: &TaggedSpan, rules: &[TagSetRule], max_len: usize) -> Option<RejectReason> {
    let tags = span.tags();
    if tags.iter().any(|t| matches!(t, PosTag::Punct | PosTag::Sym)) {
        return Some(RejectReason::PunctSym);
    }
    let longest = rules.iter().map(|r| r.pattern.len()).max().unwrap_or(0);
    if tags.len() > max_len || tags.len() > longest {
        return Some(RejectReason::TooLong);
    }
    if !rules.iter().any(|r| r.matches(&tags)) {
        return Some(RejectReason::NotNp);
    }
    None
}

/// Filters `spans`, keeping first occurrences of accepted surfaces in input
/// order and recording a reason for every rejected span.
pub fn extract(spans: &[TaggedSpan], rules: &[TagSetRule], max_len: usize) -> Extraction {
    let mut out = Extraction::default();
    let mut seen = HashSet::new();
    for (index, span) in spans.iter().enumerate() {
        let surface = span.surface();
        match classify_span(span, rules, max_len) {
            Some(reason) => out.rejected.push(Rejection { index, surface, reason }),
            None => {
                if seen.insert(surface.clone()) {
                    out.accepted.push(surface);
                }
            }
        }
    }
    out
}

pub fn extract_short_noun_phrases(spans: &[TaggedSpan], rules: &[TagSetRule], max_len: usize) -> Vec<String> {
    extract(spans, rules, max_len).accepted
}

/// Parses a span file. Each token's tag follows its last underscore, so
/// surfaces may themselves contain underscores.
pub fn parse_spans(src: &str) -> Result<Vec<TaggedSpan>, ExtractionError> {
    let mut spans = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut tokens = Vec::new();
        for tok in raw.split_whitespace() {
            let (surface, tag) = tok
                .rsplit_once('_')
                .filter(|(s, _)| !s.is_empty())
                .ok_or_else(|| ExtractionError::MissingTag { line, token: tok.to_string() })?;
            let pos = tag.parse().map_err(|e| ExtractionError::Tag { line, source: Box::new(e) })?;
            tokens.push(Token { surface: surface.to_string(), pos });
        }
        spans.extend(TaggedSpan::new(tokens));
    }
    Ok(spans)
}

/// Parses a tagset file: one rule per line, tags separated by whitespace.
pub fn parse_tagsets(src: &str) -> Result<Vec<TagSetRule>, ExtractionError> {
    let mut rules = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let pattern = raw
            .split_whitespace()
            .map(|t| t.parse().map_err(|e| ExtractionError::Tag { line, source: Box::new(e) }))
            .collect::<Result<Vec<PosTag>, _>>()?;
        let len = pattern.len();
        rules.push(TagSetRule::new(pattern).ok_or(ExtractionError::RuleLength { line, len })?);
    }
    Ok(rules)
}
