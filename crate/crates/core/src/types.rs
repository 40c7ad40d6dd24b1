//! Shared vocabulary: labels, capabilities and placeholder kinds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::UnknownName;

/// Binary gold/predicted label. On the wire these are `"ade"` / `"no_ade"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Ade,
    NoAde,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Ade, Label::NoAde];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Ade => "ade",
            Label::NoAde => "no_ade",
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Ade => Label::NoAde,
            Label::NoAde => Label::Ade,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ade" => Ok(Label::Ade),
            "no_ade" => Ok(Label::NoAde),
            other => Err(UnknownName::new("label", other)),
        }
    }
}

/// The four linguistic capabilities under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapabilityKind {
    TemporalOrder,
    PositiveSentiment,
    BeneficialEffect,
    Negation,
}

impl CapabilityKind {
    pub const ALL: [CapabilityKind; 4] = [
        CapabilityKind::TemporalOrder,
        CapabilityKind::PositiveSentiment,
        CapabilityKind::BeneficialEffect,
        CapabilityKind::Negation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CapabilityKind::TemporalOrder => "temporal_order",
            CapabilityKind::PositiveSentiment => "positive_sentiment",
            CapabilityKind::BeneficialEffect => "beneficial_effect",
            CapabilityKind::Negation => "negation",
        }
    }

    /// Human-facing name used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            CapabilityKind::TemporalOrder => "Temporal Order",
            CapabilityKind::PositiveSentiment => "Positive Sentiment",
            CapabilityKind::BeneficialEffect => "Beneficial Effect",
            CapabilityKind::Negation => "Negation",
        }
    }

    /// Labels a template of this capability may legally carry.
    pub fn allowed_labels(self) -> &'static [Label] {
        match self {
            CapabilityKind::PositiveSentiment => &[Label::Ade],
            _ => &Label::ALL,
        }
    }

    /// Whether one variation per base is sampled (true) or every template
    /// is kept when building a suite.
    pub fn samples_one_variation(self) -> bool {
        !matches!(self, CapabilityKind::BeneficialEffect)
    }
}

impl fmt::Display for CapabilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CapabilityKind {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CapabilityKind::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownName::new("capability", s))
    }
}

/// Sub-test of a capability. Only temporal order uses anything but `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Standard,
    SingleTime,
    DoubleTime,
    None,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Standard,
        Variant::SingleTime,
        Variant::DoubleTime,
        Variant::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::SingleTime => "single_time",
            Variant::DoubleTime => "double_time",
            Variant::None => "none",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::SingleTime => "single time entity",
            Variant::DoubleTime => "double time entities",
            Variant::None => "",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| UnknownName::new("variant", s))
    }
}

/// A capability together with its variant, e.g. temporal order / single time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Capability {
    pub kind: CapabilityKind,
    pub variant: Variant,
}

impl Capability {
    pub const fn new(kind: CapabilityKind, variant: Variant) -> Self {
        Capability { kind, variant }
    }

    /// Every legal (kind, variant) combination in canonical report order.
    pub const ALL: [Capability; 6] = [
        Capability::new(CapabilityKind::TemporalOrder, Variant::Standard),
        Capability::new(CapabilityKind::TemporalOrder, Variant::SingleTime),
        Capability::new(CapabilityKind::TemporalOrder, Variant::DoubleTime),
        Capability::new(CapabilityKind::PositiveSentiment, Variant::None),
        Capability::new(CapabilityKind::BeneficialEffect, Variant::None),
        Capability::new(CapabilityKind::Negation, Variant::None),
    ];

    pub fn is_legal(self) -> bool {
        match self.kind {
            CapabilityKind::TemporalOrder => self.variant != Variant::None,
            _ => self.variant == Variant::None,
        }
    }

    /// Display name such as "Temporal Order (single time entity)".
    pub fn title(self) -> String {
        match self.variant {
            Variant::None => self.kind.title().to_string(),
            v => format!("{} ({})", self.kind.title(), v.title()),
        }
    }
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.kind, self.variant)
    }
}

/// Closed set of placeholder names that may appear as `{name}` in template text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaceholderKind {
    Drug,
    Ade,
    MildAde,
    TimeEntity,
    TimeEntitySmall,
    TimeEntityLarge,
}

impl PlaceholderKind {
    pub const ALL: [PlaceholderKind; 6] = [
        PlaceholderKind::Drug,
        PlaceholderKind::Ade,
        PlaceholderKind::MildAde,
        PlaceholderKind::TimeEntity,
        PlaceholderKind::TimeEntitySmall,
        PlaceholderKind::TimeEntityLarge,
    ];

    /// The name written between braces in template text.
    pub fn name(self) -> &'static str {
        match self {
            PlaceholderKind::Drug => "drug",
            PlaceholderKind::Ade => "ade",
            PlaceholderKind::MildAde => "mild_ade",
            PlaceholderKind::TimeEntity => "time_entity",
            PlaceholderKind::TimeEntitySmall => "time_entity_small",
            PlaceholderKind::TimeEntityLarge => "time_entity_large",
        }
    }

    pub fn from_name(name: &str) -> Option<PlaceholderKind> {
        PlaceholderKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Placeholder kinds a template of `cap` may contain.
    pub fn allowed_in(cap: Capability) -> &'static [PlaceholderKind] {
        use PlaceholderKind::*;
        match (cap.kind, cap.variant) {
            (CapabilityKind::TemporalOrder, Variant::Standard) => &[Drug, Ade],
            (CapabilityKind::TemporalOrder, Variant::SingleTime) => &[Drug, Ade, TimeEntity],
            (CapabilityKind::TemporalOrder, Variant::DoubleTime) => {
                &[Drug, Ade, TimeEntitySmall, TimeEntityLarge]
            }
            (CapabilityKind::PositiveSentiment, _) => &[Drug, MildAde],
            (CapabilityKind::BeneficialEffect, _) => &[Drug],
            (CapabilityKind::Negation, _) => &[Drug, Ade],
            (CapabilityKind::TemporalOrder, Variant::None) => &[],
        }
    }
}

impl fmt::Display for PlaceholderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlaceholderKind {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlaceholderKind::from_name(s).ok_or_else(|| UnknownName::new("placeholder kind", s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_names_round_trip() {
        for l in Label::ALL {
            assert_eq!(l.as_str().parse::<Label>().unwrap(), l);
            assert_eq!(serde_json::to_string(&l).unwrap(), format!("\"{}\"", l.as_str()));
        }
        for c in CapabilityKind::ALL {
            assert_eq!(c.as_str().parse::<CapabilityKind>().unwrap(), c);
        }
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        for k in PlaceholderKind::ALL {
            assert_eq!(PlaceholderKind::from_name(k.name()), Some(k));
        }
        assert!("drg".parse::<PlaceholderKind>().is_err());
    }

    #[test]
    fn variant_only_on_temporal_order() {
        for kind in CapabilityKind::ALL {
            for variant in Variant::ALL {
                let legal = Capability::new(kind, variant).is_legal();
                let expected = (kind == CapabilityKind::TemporalOrder) != (variant == Variant::None);
                assert_eq!(legal, expected, "{kind}/{variant}");
            }
        }
        assert!(Capability::ALL.iter().all(|c| c.is_legal()));
    }

    #[test]
    fn positive_sentiment_is_ade_only() {
        assert_eq!(CapabilityKind::PositiveSentiment.allowed_labels(), &[Label::Ade]);
        assert_eq!(CapabilityKind::Negation.allowed_labels().len(), 2);
    }

    #[test]
    fn mild_ade_only_in_positive_sentiment() {
        for cap in Capability::ALL {
            let has = PlaceholderKind::allowed_in(cap).contains(&PlaceholderKind::MildAde);
            assert_eq!(has, cap.kind == CapabilityKind::PositiveSentiment);
        }
    }
}
