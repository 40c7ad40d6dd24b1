//! Entity pools used to fill template placeholders.
//!
//! A lexicon document is a single JSON object with the lists `drugs`, `ades`,
//! `mild_ades`, `beneficial_effects` and `time_entities` (the latter as
//! `{magnitude, unit}` objects). Relational duration pairs are derived from
//! the time entities rather than stored.

use std::collections::HashSet;
use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_MAGNITUDE: u8 = 1;
pub const MAX_MAGNITUDE: u8 = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    Days,
    Weeks,
    Months,
}

impl TimeUnit {
    pub const ALL: [TimeUnit; 3] = [TimeUnit::Days, TimeUnit::Weeks, TimeUnit::Months];

    /// Days per unit: a week is 7 days and a month is 30.
    pub fn days(self) -> u32 {
        match self {
            TimeUnit::Days => 1,
            TimeUnit::Weeks => 7,
            TimeUnit::Months => 30,
        }
    }

    fn word(self, singular: bool) -> &'static str {
        match (self, singular) {
            (TimeUnit::Days, true) => "day",
            (TimeUnit::Days, false) => "days",
            (TimeUnit::Weeks, true) => "week",
            (TimeUnit::Weeks, false) => "weeks",
            (TimeUnit::Months, true) => "month",
            (TimeUnit::Months, false) => "months",
        }
    }
}

/// A time span such as "3 weeks", magnitude in `1..=25`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDuration", into = "RawDuration")]
pub struct Duration {
    magnitude: u8,
    unit: TimeUnit,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDuration {
    magnitude: i64,
    unit: TimeUnit,
}

impl TryFrom<RawDuration> for Duration {
    type Error = LexiconError;

    fn try_from(raw: RawDuration) -> Result<Self, Self::Error> {
        u8::try_from(raw.magnitude)
            .map_err(|_| LexiconError::MagnitudeOutOfRange(raw.magnitude))
            .and_then(|m| Duration::new(m, raw.unit))
    }
}

impl From<Duration> for RawDuration {
    fn from(d: Duration) -> Self {
        RawDuration {
            magnitude: i64::from(d.magnitude),
            unit: d.unit,
        }
    }
}

impl Duration {
    pub fn new(magnitude: u8, unit: TimeUnit) -> Result<Self, LexiconError> {
        if !(MIN_MAGNITUDE..=MAX_MAGNITUDE).contains(&magnitude) {
            return Err(LexiconError::MagnitudeOutOfRange(i64::from(magnitude)));
        }
        Ok(Duration { magnitude, unit })
    }

    pub fn magnitude(self) -> u8 {
        self.magnitude
    }

    pub fn unit(self) -> TimeUnit {
        self.unit
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.magnitude, self.unit.word(self.magnitude == 1))
    }
}

/// Length of a duration in days under the fixed unit convention.
pub fn canonical_days(d: Duration) -> u32 {
    u32::from(d.magnitude) * d.unit.days()
}

/// Two durations where `large` is strictly longer than `small`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationalPair {
    pub large: Duration,
    pub small: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("missing required list `{0}`")]
    MissingList(&'static str),
    #[error("duplicate entry {entry:?} in `{list}`")]
    DuplicateEntry { list: &'static str, entry: String },
    #[error("magnitude {0} out of range {MIN_MAGNITUDE}..={MAX_MAGNITUDE}")]
    MagnitudeOutOfRange(i64),
    #[error("malformed duration at time_entities[{index}]: {message}")]
    MalformedDuration { index: usize, message: String },
    #[error("empty magnitude range or unit set")]
    EmptyGrid,
    #[error("duration pool is empty")]
    EmptyPool,
    #[error("no pair of durations in the pool differs in length")]
    NoRelationalPairs,
}

/// All entity pools.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub drugs: Vec<String>,
    pub ades: Vec<String>,
    pub mild_ades: Vec<String>,
    pub beneficial_effects: Vec<String>,
    pub time_entities: Vec<Duration>,
    /// Derived from `time_entities`; empty when no two durations differ.
    pub relational_pairs: Vec<RelationalPair>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconDocument {
    drugs: Option<Vec<String>>,
    ades: Option<Vec<String>>,
    mild_ades: Option<Vec<String>>,
    beneficial_effects: Option<Vec<String>>,
    time_entities: Option<Vec<serde_json::Value>>,
}

const SHIPPED: &str = include_str!("../data/lexicon.json");

impl Lexicon {
    /// Assembles a lexicon, checking uniqueness and deriving relational pairs.
    pub fn new(
        drugs: Vec<String>,
        ades: Vec<String>,
        mild_ades: Vec<String>,
        beneficial_effects: Vec<String>,
        time_entities: Vec<Duration>,
    ) -> Result<Self, LexiconError> {
        unique("drugs", &drugs)?;
        unique("ades", &ades)?;
        unique("mild_ades", &mild_ades)?;
        unique("beneficial_effects", &beneficial_effects)?;
        let mut seen = HashSet::new();
        for d in &time_entities {
            if !seen.insert(*d) {
                return Err(LexiconError::DuplicateEntry {
                    list: "time_entities",
                    entry: d.to_string(),
                });
            }
        }
        let relational_pairs = match generate_relational_pairs(&time_entities) {
            Ok(p) => p,
            Err(LexiconError::EmptyPool | LexiconError::NoRelationalPairs) => Vec::new(),
            Err(e) => return Err(e),
        };
        Ok(Lexicon {
            drugs,
            ades,
            mild_ades,
            beneficial_effects,
            time_entities,
            relational_pairs,
        })
    }

    /// The lexicon bundled with the crate.
    pub fn shipped() -> Self {
        load_lexicon(SHIPPED).expect("bundled lexicon is valid")
    }

    pub fn shipped_source() -> &'static str {
        SHIPPED
    }

    /// Canonical pretty-printed document with a trailing newline.
    pub fn to_document(&self) -> String {
        let doc = LexiconDocument {
            drugs: Some(self.drugs.clone()),
            ades: Some(self.ades.clone()),
            mild_ades: Some(self.mild_ades.clone()),
            beneficial_effects: Some(self.beneficial_effects.clone()),
            time_entities: Some(
                self.time_entities
                    .iter()
                    .map(|d| serde_json::to_value(d).expect("duration serializes"))
                    .collect(),
            ),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("lexicon serializes");
        s.push('\n');
        s
    }
}

fn unique(list: &'static str, entries: &[String]) -> Result<(), LexiconError> {
    let mut seen = HashSet::with_capacity(entries.len());
    for e in entries {
        if !seen.insert(e.as_str()) {
            return Err(LexiconError::DuplicateEntry {
                list,
                entry: e.clone(),
            });
        }
    }
    Ok(())
}

/// Parses a lexicon document, preserving list order.
pub fn load_lexicon(source: &str) -> Result<Lexicon, LexiconError> {
    let doc: LexiconDocument =
        serde_json::from_str(source).map_err(|e| LexiconError::Syntax(e.to_string()))?;
    let time_entities = doc
        .time_entities
        .ok_or(LexiconError::MissingList("time_entities"))?
        .into_iter()
        .enumerate()
        .map(|(index, v)| {
            serde_json::from_value::<Duration>(v).map_err(|e| LexiconError::MalformedDuration {
                index,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Lexicon::new(
        doc.drugs.ok_or(LexiconError::MissingList("drugs"))?,
        doc.ades.ok_or(LexiconError::MissingList("ades"))?,
        doc.mild_ades.ok_or(LexiconError::MissingList("mild_ades"))?,
        doc.beneficial_effects
            .ok_or(LexiconError::MissingList("beneficial_effects"))?,
        time_entities,
    )
}

/// Cross product of magnitudes and units, ordered by (unit, magnitude).
pub fn generate_time_entities(
    magnitudes: RangeInclusive<u8>,
    units: &[TimeUnit],
) -> Result<Vec<Duration>, LexiconError> {
    if magnitudes.is_empty() || units.is_empty() {
        return Err(LexiconError::EmptyGrid);
    }
    let mut units = units.to_vec();
    units.sort();
    units.dedup();
    let mut out = Vec::with_capacity(units.len() * magnitudes.len());
    for unit in units {
        for m in magnitudes.clone() {
            out.push(Duration::new(m, unit)?);
        }
    }
    Ok(out)
}

/// Every ordered pair from `pool` whose first element is strictly longer.
/// Pairs are listed with `large` in pool order, then `small` in pool order.
pub fn generate_relational_pairs(pool: &[Duration]) -> Result<Vec<RelationalPair>, LexiconError> {
    if pool.is_empty() {
        return Err(LexiconError::EmptyPool);
    }
    let pairs: Vec<RelationalPair> = pool
        .iter()
        .flat_map(|&large| {
            pool.iter()
                .filter(move |&&small| canonical_days(large) > canonical_days(small))
                .map(move |&small| RelationalPair { large, small })
        })
        .collect();
    if pairs.is_empty() {
        return Err(LexiconError::NoRelationalPairs);
    }
    Ok(pairs)
}
