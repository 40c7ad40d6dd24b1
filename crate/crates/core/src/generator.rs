//! Suite generation: seeded entity sampling, variation selection and
//! template expansion into rendered test cases.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::jsonl;
use crate::lexicon::{canonical_days, Duration, Lexicon, RelationalPair};
use crate::sampling::{SeededSampler, Stream};
use crate::template_corpus::{group_by_base, serialize_corpus, Template};
use crate::types::{Capability, CapabilityKind, Label, PlaceholderKind, Variant};

/// How the relational (large, small) duration pairs are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSampling {
    /// Sample pairs directly from all strictly ordered pairs of the lexicon.
    #[default]
    Pairs,
    /// Shuffle the durations and pair consecutive draws, skipping ties.
    Durations,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub n_ades: usize,
    pub n_mild_ades: usize,
    pub n_drugs: usize,
    pub n_single_time: usize,
    pub n_relational_pairs: usize,
    pub one_variation_per_base: bool,
    pub pair_sampling: PairSampling,
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            n_ades: 15,
            n_mild_ades: 15,
            n_drugs: 5,
            n_single_time: 7,
            n_relational_pairs: 7,
            one_variation_per_base: true,
            pair_sampling: PairSampling::Pairs,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("{field} = {requested} but must be between 1 and the pool size {available}")]
    BadCount {
        field: &'static str,
        requested: usize,
        available: usize,
    },
    #[error("only {found} relational pairs could be formed, {requested} requested")]
    InsufficientPairs { requested: usize, found: usize },
    #[error("template {template_id}: empty pool for {{{kind}}}")]
    EmptyPool {
        template_id: String,
        kind: PlaceholderKind,
    },
}

/// One rendered template instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub case_id: String,
    pub template_id: String,
    pub text: String,
    pub gold: Label,
    pub capability: Capability,
    /// Placeholder name to entity string.
    pub fills: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseRecord {
    case_id: String,
    template_id: String,
    capability: CapabilityKind,
    variant: Variant,
    label: Label,
    text: String,
    fills: BTreeMap<String, String>,
}

impl From<&TestCase> for CaseRecord {
    fn from(c: &TestCase) -> Self {
        CaseRecord {
            case_id: c.case_id.clone(),
            template_id: c.template_id.clone(),
            capability: c.capability.kind,
            variant: c.capability.variant,
            label: c.gold,
            text: c.text.clone(),
            fills: c.fills.clone(),
        }
    }
}

impl From<CaseRecord> for TestCase {
    fn from(r: CaseRecord) -> Self {
        TestCase {
            case_id: r.case_id,
            template_id: r.template_id,
            text: r.text,
            gold: r.label,
            capability: Capability::new(r.capability, r.variant),
            fills: r.fills,
        }
    }
}

/// Generated cases plus, when built in-process, how they were built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suite {
    /// Sorted by `case_id`.
    pub cases: Vec<TestCase>,
    pub config: Option<SamplingConfig>,
    /// SHA-256 over the canonical corpus and lexicon documents.
    pub fingerprint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate case id {case_id:?}")]
    DuplicateCase { line: usize, case_id: String },
}

impl Suite {
    /// The suite file: one record per line, in case-id order.
    pub fn to_jsonl(&self) -> String {
        let records: Vec<CaseRecord> = self.cases.iter().map(CaseRecord::from).collect();
        jsonl::write_records(&records)
    }

    pub fn from_jsonl(src: &str) -> Result<Suite, SuiteError> {
        let records: Vec<(usize, CaseRecord)> =
            jsonl::read_records(src).map_err(|e| SuiteError::Syntax {
                line: e.line,
                message: e.source.to_string(),
            })?;
        let mut seen = HashSet::with_capacity(records.len());
        let mut cases = Vec::with_capacity(records.len());
        for (line, r) in records {
            if !seen.insert(r.case_id.clone()) {
                return Err(SuiteError::DuplicateCase {
                    line,
                    case_id: r.case_id,
                });
            }
            cases.push(TestCase::from(r));
        }
        cases.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        Ok(Suite {
            cases,
            config: None,
            fingerprint: None,
        })
    }

    pub fn counts(&self) -> CountTable {
        CountTable::of(&self.cases)
    }
}

/// Entities drawn for one suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledPools {
    pub drugs: Vec<String>,
    pub ades: Vec<String>,
    pub mild_ades: Vec<String>,
    pub time_entities: Vec<Duration>,
    pub relational_pairs: Vec<RelationalPair>,
}

fn checked(field: &'static str, requested: usize, available: usize) -> Result<usize, GenerateError> {
    if requested == 0 || requested > available {
        return Err(GenerateError::BadCount {
            field,
            requested,
            available,
        });
    }
    Ok(requested)
}

/// Draws every pool according to `config`.
pub fn sample_pools(lexicon: &Lexicon, config: &SamplingConfig) -> Result<SampledPools, GenerateError> {
    let seed = config.seed;
    let draw = |pool: &[String], n: usize, field, stream| {
        checked(field, n, pool.len()).map(|n| SeededSampler::new(seed, stream).sample(pool, n))
    };
    let drugs = draw(&lexicon.drugs, config.n_drugs, "n_drugs", Stream::Drugs)?;
    let ades = draw(&lexicon.ades, config.n_ades, "n_ades", Stream::Ades)?;
    let mild_ades = draw(&lexicon.mild_ades, config.n_mild_ades, "n_mild_ades", Stream::MildAdes)?;

    let n_single = checked("n_single_time", config.n_single_time, lexicon.time_entities.len())?;
    let time_entities = SeededSampler::new(seed, Stream::SingleTime).sample(&lexicon.time_entities, n_single);

    let mut pair_rng = SeededSampler::new(seed, Stream::RelationalPairs);
    let relational_pairs = match config.pair_sampling {
        PairSampling::Pairs => {
            let n = checked(
                "n_relational_pairs",
                config.n_relational_pairs,
                lexicon.relational_pairs.len(),
            )?;
            pair_rng.sample(&lexicon.relational_pairs, n)
        }
        PairSampling::Durations => {
            let wanted = config.n_relational_pairs;
            checked("n_relational_pairs", wanted, lexicon.time_entities.len() / 2)?;
            let order = pair_rng.permutation(lexicon.time_entities.len());
            let mut pairs = Vec::with_capacity(wanted);
            let mut pending: Option<Duration> = None;
            for d in order.into_iter().map(|i| lexicon.time_entities[i]) {
                if pairs.len() == wanted {
                    break;
                }
                match pending.take() {
                    None => pending = Some(d),
                    Some(a) if canonical_days(a) == canonical_days(d) => pending = Some(a),
                    Some(a) => {
                        let (large, small) = if canonical_days(a) > canonical_days(d) { (a, d) } else { (d, a) };
                        pairs.push(RelationalPair { large, small });
                    }
                }
            }
            if pairs.len() < wanted {
                return Err(GenerateError::InsufficientPairs {
                    requested: wanted,
                    found: pairs.len(),
                });
            }
            pairs
        }
    };

    Ok(SampledPools {
        drugs,
        ades,
        mild_ades,
        time_entities,
        relational_pairs,
    })
}

/// Picks one template per base for the capabilities that sample variations;
/// keeps every template otherwise. Result is in corpus group order.
pub fn select_variations<'a>(corpus: &'a [Template], config: &SamplingConfig) -> Vec<&'a Template> {
    let mut sampler = SeededSampler::new(config.seed, Stream::Variations);
    let mut out = Vec::new();
    for group in group_by_base(corpus) {
        let kind = group[0].capability.kind;
        if config.one_variation_per_base && kind.samples_one_variation() {
            let pick = sampler.below(group.len() as u64) as usize;
            out.push(group[pick]);
        } else {
            out.extend(group);
        }
    }
    out
}

enum Axis {
    Entity(PlaceholderKind, Vec<String>),
    Pair(Vec<(String, String)>),
}

impl Axis {
    fn len(&self) -> usize {
        match self {
            Axis::Entity(_, v) => v.len(),
            Axis::Pair(v) => v.len(),
        }
    }

    fn fill(&self, i: usize, fills: &mut BTreeMap<String, String>) {
        match self {
            Axis::Entity(kind, v) => {
                fills.insert(kind.name().to_string(), v[i].clone());
            }
            Axis::Pair(v) => {
                let (large, small) = &v[i];
                fills.insert(PlaceholderKind::TimeEntityLarge.name().to_string(), large.clone());
                fills.insert(PlaceholderKind::TimeEntitySmall.name().to_string(), small.clone());
            }
        }
    }
}

fn axes(template: &Template, pools: &SampledPools) -> Result<Vec<Axis>, GenerateError> {
    let mut out = Vec::new();
    let mut pair_done = false;
    for kind in template.distinct_placeholders() {
        let axis = match kind {
            PlaceholderKind::Drug => Axis::Entity(kind, pools.drugs.clone()),
            PlaceholderKind::Ade => Axis::Entity(kind, pools.ades.clone()),
            PlaceholderKind::MildAde => Axis::Entity(kind, pools.mild_ades.clone()),
            PlaceholderKind::TimeEntity => {
                Axis::Entity(kind, pools.time_entities.iter().map(ToString::to_string).collect())
            }
            PlaceholderKind::TimeEntityLarge | PlaceholderKind::TimeEntitySmall => {
                if pair_done {
                    continue;
                }
                pair_done = true;
                Axis::Pair(
                    pools
                        .relational_pairs
                        .iter()
                        .map(|p| (p.large.to_string(), p.small.to_string()))
                        .collect(),
                )
            }
        };
        if axis.len() == 0 {
            return Err(GenerateError::EmptyPool {
                template_id: template.id.clone(),
                kind,
            });
        }
        out.push(axis);
    }
    Ok(out)
}

/// Renders `template` with every combination of the sampled entities.
/// Relational pairs count as one axis; the first placeholder varies slowest.
pub fn expand(template: &Template, pools: &SampledPools) -> Result<Vec<TestCase>, GenerateError> {
    let axes = axes(template, pools)?;
    let total: usize = axes.iter().map(Axis::len).product();
    let mut cases = Vec::with_capacity(total);
    let mut digits = vec![0usize; axes.len()];
    for index in 0..total {
        let mut fills = BTreeMap::new();
        for (axis, &d) in axes.iter().zip(&digits) {
            axis.fill(d, &mut fills);
        }
        let text = template.render(|k| fills[k.name()].as_str());
        cases.push(TestCase {
            case_id: format!("{}#{:04}", template.id, index),
            template_id: template.id.clone(),
            text,
            gold: template.label,
            capability: template.capability,
            fills,
        });
        for (pos, axis) in axes.iter().enumerate().rev() {
            digits[pos] += 1;
            if digits[pos] < axis.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(cases)
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Content hash of the inputs a suite was generated from.
pub fn fingerprint(corpus: &[Template], lexicon: &Lexicon) -> String {
    let mut h = Sha256::new();
    h.update(serialize_corpus(corpus).as_bytes());
    h.update(b"\n");
    h.update(lexicon.to_document().as_bytes());
    hex::encode(h.finalize())
}

/// Samples pools, selects variations and expands them into a sorted suite.
pub fn build_suite(corpus: &[Template], lexicon: &Lexicon, config: &SamplingConfig) -> Result<Suite, GenerateError> {
    let pools = sample_pools(lexicon, config)?;
    let mut cases = Vec::new();
    for t in select_variations(corpus, config) {
        cases.extend(expand(t, &pools)?);
    }
    cases.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    Ok(Suite {
        cases,
        config: Some(config.clone()),
        fingerprint: Some(fingerprint(corpus, lexicon)),
    })
}

/// Case counts per (capability, label) test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub rows: Vec<CountRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub capability: Capability,
    pub label: Label,
    pub count: usize,
}

impl CountTable {
    pub fn of(cases: &[TestCase]) -> Self {
        let mut m: BTreeMap<(Capability, Label), usize> = BTreeMap::new();
        for c in cases {
            *m.entry((c.capability, c.gold)).or_insert(0) += 1;
        }
        let rows = test_order()
            .filter_map(|(capability, label)| {
                m.get(&(capability, label)).map(|&count| CountRow {
                    capability,
                    label,
                    count,
                })
            })
            .collect();
        CountTable { rows }
    }

    /// The published per-test counts for the default configuration.
    pub fn expected_default() -> Self {
        use CapabilityKind::*;
        let row = |kind, variant, label, count| CountRow {
            capability: Capability::new(kind, variant),
            label,
            count,
        };
        CountTable {
            rows: vec![
                row(TemporalOrder, Variant::Standard, Label::NoAde, 1050),
                row(TemporalOrder, Variant::Standard, Label::Ade, 900),
                row(TemporalOrder, Variant::SingleTime, Label::NoAde, 1050),
                row(TemporalOrder, Variant::SingleTime, Label::Ade, 1050),
                row(TemporalOrder, Variant::DoubleTime, Label::NoAde, 1575),
                row(TemporalOrder, Variant::DoubleTime, Label::Ade, 1575),
                row(PositiveSentiment, Variant::None, Label::Ade, 2700),
                row(BeneficialEffect, Variant::None, Label::NoAde, 120),
                row(BeneficialEffect, Variant::None, Label::Ade, 120),
                row(Negation, Variant::None, Label::NoAde, 825),
                row(Negation, Variant::None, Label::Ade, 300),
            ],
        }
    }

    pub fn total(&self) -> usize {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn total_for(&self, label: Label) -> usize {
        self.rows.iter().filter(|r| r.label == label).map(|r| r.count).sum()
    }

    pub fn get(&self, capability: Capability, label: Label) -> usize {
        self.rows
            .iter()
            .find(|r| r.capability == capability && r.label == label)
            .map_or(0, |r| r.count)
    }

    /// Human-readable differences against `expected`; empty when equal.
    pub fn diff(&self, expected: &CountTable) -> Vec<String> {
        let mut out = Vec::new();
        for (capability, label) in test_order() {
            let (got, want) = (self.get(capability, label), expected.get(capability, label));
            if got != want {
                out.push(format!("{} {label}: expected {want}, got {got}", capability.title()));
            }
        }
        out
    }
}

impl fmt::Display for CountTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<42} {:<7} {:>8}", "Test", "Label", "#Cases")?;
        for r in &self.rows {
            writeln!(f, "{:<42} {:<7} {:>8}", r.capability.title(), r.label.as_str(), r.count)?;
        }
        write!(f, "{:<42} {:<7} {:>8}", "Total", "", self.total())
    }
}

/// Canonical (capability, label) order: capabilities as listed, NO_ADE first.
pub fn test_order() -> impl Iterator<Item = (Capability, Label)> {
    Capability::ALL
        .into_iter()
        .flat_map(|c| [Label::NoAde, Label::Ade].into_iter().map(move |l| (c, l)))
}

/// Mean whitespace-token length of rendered cases per gold label.
pub fn mean_token_lengths(cases: &[TestCase]) -> BTreeMap<Label, f64> {
    let mut acc: BTreeMap<Label, (usize, usize)> = BTreeMap::new();
    for c in cases {
        let e = acc.entry(c.gold).or_insert((0, 0));
        e.0 += c.text.split_whitespace().count();
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(l, (tokens, n))| (l, tokens as f64 / n as f64))
        .collect()
}
