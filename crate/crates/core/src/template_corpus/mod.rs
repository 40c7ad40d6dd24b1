//! The template corpus: parsing, serialization and placeholder handling.
//!
//! A corpus file is line-delimited JSON with exactly the fields
//! `{id, base_id, capability, variant, label, text}`. Placeholders are written
//! `{name}` where `name` is one of the [`PlaceholderKind`] names.

mod authoring;
mod validate;
mod variation;

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsonl;
use crate::types::{Capability, CapabilityKind, Label, PlaceholderKind, Variant};

pub use authoring::{author_corpus, AuthoringError, VariationVocabulary};
pub use validate::{
    validate_corpus, CorpusManifest, ManifestRow, ValidateOptions, ValidationReport, Violation,
    ViolationKind,
};
pub use variation::{apply_variation, VariationError, VariationRule};

const SHIPPED_CORPUS: &str = include_str!("../../data/corpus.jsonl");
const SHIPPED_BASES: &str = include_str!("../../data/authoring/base_templates.jsonl");
const SHIPPED_VOCABULARY: &str = include_str!("../../data/authoring/variation_vocabulary.json");

/// The bundled corpus document.
pub fn shipped_corpus_source() -> &'static str {
    SHIPPED_CORPUS
}

/// The bundled corpus, parsed.
pub fn shipped_corpus() -> Vec<Template> {
    parse_corpus(SHIPPED_CORPUS).expect("bundled corpus parses")
}

/// Base templates and variation vocabulary the bundled corpus is authored from.
pub fn shipped_authoring_inputs() -> (Vec<Template>, VariationVocabulary) {
    let bases = parse_corpus(SHIPPED_BASES).expect("bundled base templates parse");
    let vocabulary = serde_json::from_str(SHIPPED_VOCABULARY).expect("bundled vocabulary parses");
    (bases, vocabulary)
}

/// One labeled test pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub id: String,
    /// Equal to `id` for a base template.
    pub base_id: String,
    pub capability: Capability,
    pub label: Label,
    pub text: String,
    /// Placeholders in order of appearance, duplicates included.
    pub placeholders: Vec<PlaceholderKind>,
}

impl Template {
    /// Builds a template, deriving `placeholders` from `text`.
    pub fn new(
        id: impl Into<String>,
        base_id: impl Into<String>,
        capability: Capability,
        label: Label,
        text: impl Into<String>,
    ) -> Result<Self, PlaceholderError> {
        let text = text.into();
        let placeholders = parse_placeholders(&text)?;
        Ok(Template {
            id: id.into(),
            base_id: base_id.into(),
            capability,
            label,
            text,
            placeholders,
        })
    }

    pub fn is_base(&self) -> bool {
        self.id == self.base_id
    }

    /// Distinct placeholder kinds in order of first appearance.
    pub fn distinct_placeholders(&self) -> Vec<PlaceholderKind> {
        let mut seen = Vec::new();
        for &k in &self.placeholders {
            if !seen.contains(&k) {
                seen.push(k);
            }
        }
        seen
    }

    pub fn placeholder_multiset(&self) -> BTreeMap<PlaceholderKind, usize> {
        multiset(&self.placeholders)
    }

    /// Substitutes every placeholder with `fill(kind)`.
    ///
    /// A single space is inserted between an entity and an adjacent
    /// alphanumeric character when the template has none there; all other
    /// text is copied verbatim.
    pub fn render<'a>(&self, mut fill: impl FnMut(PlaceholderKind) -> &'a str) -> String {
        let mut out = String::with_capacity(self.text.len() + 32);
        let segments = segments(&self.text).expect("template text was validated at construction");
        let mut iter = segments.iter().peekable();
        while let Some(seg) = iter.next() {
            match seg {
                Segment::Literal(range) => out.push_str(&self.text[range.clone()]),
                Segment::Placeholder(kind, _) => {
                    if out.chars().next_back().is_some_and(char::is_alphanumeric) {
                        out.push(' ');
                    }
                    out.push_str(fill(*kind));
                    if let Some(Segment::Literal(next)) = iter.peek() {
                        if self.text[next.clone()]
                            .chars()
                            .next()
                            .is_some_and(char::is_alphanumeric)
                        {
                            out.push(' ');
                        }
                    }
                }
            }
        }
        out
    }

    pub(crate) fn to_record(&self) -> TemplateRecord {
        TemplateRecord {
            id: self.id.clone(),
            base_id: self.base_id.clone(),
            capability: self.capability.kind,
            variant: self.capability.variant,
            label: self.label,
            text: self.text.clone(),
        }
    }
}

pub(crate) fn multiset(kinds: &[PlaceholderKind]) -> BTreeMap<PlaceholderKind, usize> {
    let mut m = BTreeMap::new();
    for &k in kinds {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

/// Wire form of a corpus line. Field order here is the serialized order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct TemplateRecord {
    id: String,
    base_id: String,
    capability: CapabilityKind,
    variant: Variant,
    label: Label,
    text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlaceholderError {
    #[error("unknown placeholder name {0:?}")]
    Unknown(String),
    #[error("unmatched '{brace}' at byte {offset}")]
    Unmatched { brace: char, offset: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Placeholder {
        line: usize,
        #[source]
        source: PlaceholderError,
    },
    #[error("line {line}: duplicate template id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: template {id:?} refers to missing base {base_id:?}")]
    DanglingBase {
        line: usize,
        id: String,
        base_id: String,
    },
}

pub(crate) enum Segment {
    Literal(Range<usize>),
    /// Kind plus the byte range of the whole `{name}` token.
    Placeholder(PlaceholderKind, Range<usize>),
}

pub(crate) fn segments(text: &str) -> Result<Vec<Segment>, PlaceholderError> {
    let mut out = Vec::new();
    let mut literal_start = 0;
    let mut i = 0;
    let bytes = text.as_bytes();
    while i < bytes.len() {
        match bytes[i] {
            b'{' => {
                let close = text[i + 1..]
                    .find(['{', '}'])
                    .map(|p| p + i + 1)
                    .filter(|&p| bytes[p] == b'}')
                    .ok_or(PlaceholderError::Unmatched {
                        brace: '{',
                        offset: i,
                    })?;
                let name = &text[i + 1..close];
                let kind = PlaceholderKind::from_name(name)
                    .ok_or_else(|| PlaceholderError::Unknown(name.to_string()))?;
                if literal_start < i {
                    out.push(Segment::Literal(literal_start..i));
                }
                out.push(Segment::Placeholder(kind, i..close + 1));
                i = close + 1;
                literal_start = i;
            }
            b'}' => {
                return Err(PlaceholderError::Unmatched {
                    brace: '}',
                    offset: i,
                })
            }
            _ => i += 1,
        }
    }
    if literal_start < text.len() {
        out.push(Segment::Literal(literal_start..text.len()));
    }
    Ok(out)
}

/// Extracts the ordered placeholder list from template text.
pub fn parse_placeholders(text: &str) -> Result<Vec<PlaceholderKind>, PlaceholderError> {
    Ok(segments(text)?
        .into_iter()
        .filter_map(|s| match s {
            Segment::Placeholder(k, _) => Some(k),
            Segment::Literal(_) => None,
        })
        .collect())
}

/// Parses a corpus document into templates in document order.
pub fn parse_corpus(source: &str) -> Result<Vec<Template>, CorpusError> {
    let records: Vec<(usize, TemplateRecord)> =
        jsonl::read_records(source).map_err(|e| CorpusError::Syntax {
            line: e.line,
            message: e.source.to_string(),
        })?;

    let mut seen: HashMap<String, usize> = HashMap::with_capacity(records.len());
    let mut templates = Vec::with_capacity(records.len());
    let mut lines = Vec::with_capacity(records.len());
    for (line, rec) in records {
        if seen.insert(rec.id.clone(), line).is_some() {
            return Err(CorpusError::DuplicateId { line, id: rec.id });
        }
        let capability = Capability::new(rec.capability, rec.variant);
        let t = Template::new(rec.id, rec.base_id, capability, rec.label, rec.text)
            .map_err(|source| CorpusError::Placeholder { line, source })?;
        templates.push(t);
        lines.push(line);
    }
    for (t, line) in templates.iter().zip(lines) {
        if !seen.contains_key(&t.base_id) {
            return Err(CorpusError::DanglingBase {
                line,
                id: t.id.clone(),
                base_id: t.base_id.clone(),
            });
        }
    }
    Ok(templates)
}

/// Serializes templates in the canonical corpus format.
pub fn serialize_corpus(templates: &[Template]) -> String {
    let records: Vec<TemplateRecord> = templates.iter().map(Template::to_record).collect();
    jsonl::write_records(&records)
}

/// Groups templates by base id, bases in document order, each group
/// starting with the base followed by its variations in document order.
pub fn group_by_base(templates: &[Template]) -> Vec<Vec<&Template>> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut groups: Vec<Vec<&Template>> = Vec::new();
    for t in templates.iter().filter(|t| t.is_base()) {
        index.insert(&t.id, groups.len());
        groups.push(vec![t]);
    }
    for t in templates.iter().filter(|t| !t.is_base()) {
        if let Some(&g) = index.get(t.base_id.as_str()) {
            groups[g].push(t);
        }
    }
    groups
}

/// `<capability>-<variant>-<label>-<base#>` as used for shipped base templates.
pub fn base_template_id(capability: Capability, label: Label, number: usize) -> String {
    format!(
        "{}-{}-{}-{:02}",
        capability.kind, capability.variant, label, number
    )
}

/// Variation id derived from its base: `<base id>-v<var#>`.
pub fn variation_id(base_id: &str, number: usize) -> String {
    format!("{base_id}-v{number:02}")
}
