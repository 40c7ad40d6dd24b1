use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Template;
use crate::types::{CapabilityKind, PlaceholderKind, Variant};

/// Base/total template counts for one capability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub capability: CapabilityKind,
    pub base: usize,
    pub total: usize,
}

/// Expected corpus shape, one row per capability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub rows: Vec<ManifestRow>,
}

impl CorpusManifest {
    /// The shipped corpus inventory: 99 base templates, 1,505 in total.
    pub fn table5() -> Self {
        use CapabilityKind::*;
        let row = |capability, base, total| ManifestRow {
            capability,
            base,
            total,
        };
        CorpusManifest {
            rows: vec![
                row(TemporalOrder, 36, 816),
                row(PositiveSentiment, 36, 504),
                row(BeneficialEffect, 12, 48),
                row(Negation, 15, 137),
            ],
        }
    }

    /// Counts what a corpus actually contains.
    pub fn of(templates: &[Template]) -> Self {
        let rows = CapabilityKind::ALL
            .into_iter()
            .map(|capability| {
                let of_cap = templates.iter().filter(|t| t.capability.kind == capability);
                let (base, total) =
                    of_cap.fold((0, 0), |(b, n), t| (b + usize::from(t.is_base()), n + 1));
                ManifestRow {
                    capability,
                    base,
                    total,
                }
            })
            .collect();
        CorpusManifest { rows }
    }

    pub fn row(&self, capability: CapabilityKind) -> Option<&ManifestRow> {
        self.rows.iter().find(|r| r.capability == capability)
    }

    pub fn total_base(&self) -> usize {
        self.rows.iter().map(|r| r.base).sum()
    }

    pub fn total(&self) -> usize {
        self.rows.iter().map(|r| r.total).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    IllegalVariant,
    IllegalLabel,
    PlaceholderCapabilityMismatch,
    MissingPlaceholder,
    MissingDrug,
    DanglingBase,
    BaseIsVariation,
    VariationMismatch,
    CountMismatch,
    MissingCapability,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::IllegalVariant => "illegal variant",
            ViolationKind::IllegalLabel => "illegal label",
            ViolationKind::PlaceholderCapabilityMismatch => "placeholder/capability mismatch",
            ViolationKind::MissingPlaceholder => "missing placeholder",
            ViolationKind::MissingDrug => "missing drug placeholder",
            ViolationKind::DanglingBase => "dangling base",
            ViolationKind::BaseIsVariation => "base is a variation",
            ViolationKind::VariationMismatch => "variation differs from base",
            ViolationKind::CountMismatch => "count mismatch",
            ViolationKind::MissingCapability => "missing capability",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Offending template, absent for corpus-level violations.
    pub template_id: Option<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.template_id {
            Some(id) => write!(f, "{id}: {}: {}", self.kind, self.message),
            None => write!(f, "{}: {}", self.kind, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Accept templates without a `{drug}` placeholder.
    pub allow_drugless: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub counts: CorpusManifest,
    pub expected: Option<CorpusManifest>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks structural invariants and, optionally, per-capability counts.
pub fn validate_corpus(
    templates: &[Template],
    expected: Option<&CorpusManifest>,
    options: &ValidateOptions,
) -> ValidationReport {
    let mut violations = Vec::new();
    let by_id: HashMap<&str, &Template> = templates.iter().map(|t| (t.id.as_str(), t)).collect();

    for t in templates {
        let mut push = |kind, message: String| {
            violations.push(Violation {
                kind,
                template_id: Some(t.id.clone()),
                message,
            })
        };

        if !t.capability.is_legal() {
            push(
                ViolationKind::IllegalVariant,
                format!("variant {} is not valid for {}", t.capability.variant, t.capability.kind),
            );
        }
        if !t.capability.kind.allowed_labels().contains(&t.label) {
            push(
                ViolationKind::IllegalLabel,
                format!("label {} is not valid for {}", t.label, t.capability.kind),
            );
        }

        let allowed = PlaceholderKind::allowed_in(t.capability);
        for kind in t.distinct_placeholders() {
            if !allowed.contains(&kind) {
                push(
                    ViolationKind::PlaceholderCapabilityMismatch,
                    format!("{{{kind}}} is not allowed in {}", t.capability),
                );
            }
        }
        let has = |k| t.placeholders.contains(&k);
        if !options.allow_drugless && !has(PlaceholderKind::Drug) {
            push(ViolationKind::MissingDrug, "no {drug} placeholder".into());
        }
        for required in required_placeholders(t.capability.kind, t.capability.variant) {
            if !has(*required) {
                push(
                    ViolationKind::MissingPlaceholder,
                    format!("{} requires {{{required}}}", t.capability),
                );
            }
        }

        if !t.is_base() {
            match by_id.get(t.base_id.as_str()) {
                None => push(
                    ViolationKind::DanglingBase,
                    format!("base {:?} does not exist", t.base_id),
                ),
                Some(base) if !base.is_base() => push(
                    ViolationKind::BaseIsVariation,
                    format!("base {:?} is itself a variation", t.base_id),
                ),
                Some(base) => {
                    if base.capability != t.capability || base.label != t.label {
                        push(
                            ViolationKind::VariationMismatch,
                            format!(
                                "{}/{} differs from base {}/{}",
                                t.capability, t.label, base.capability, base.label
                            ),
                        );
                    }
                    if base.placeholder_multiset() != t.placeholder_multiset() {
                        push(
                            ViolationKind::VariationMismatch,
                            "placeholder multiset differs from base".into(),
                        );
                    }
                }
            }
        }
    }

    let counts = CorpusManifest::of(templates);
    if let Some(expected) = expected {
        for want in &expected.rows {
            let got = counts.row(want.capability).copied().unwrap_or(ManifestRow {
                capability: want.capability,
                base: 0,
                total: 0,
            });
            if got.total == 0 && want.total > 0 {
                violations.push(Violation {
                    kind: ViolationKind::MissingCapability,
                    template_id: None,
                    message: format!("no {} templates", want.capability),
                });
            }
            if got.base != want.base || got.total != want.total {
                violations.push(Violation {
                    kind: ViolationKind::CountMismatch,
                    template_id: None,
                    message: format!(
                        "{}: expected {} base / {} total, found {} / {}",
                        want.capability, want.base, want.total, got.base, got.total
                    ),
                });
            }
        }
    }

    ValidationReport {
        counts,
        expected: expected.cloned(),
        violations,
    }
}

fn required_placeholders(kind: CapabilityKind, variant: Variant) -> &'static [PlaceholderKind] {
    use PlaceholderKind::*;
    match (kind, variant) {
        (CapabilityKind::TemporalOrder, Variant::Standard) => &[Ade],
        (CapabilityKind::TemporalOrder, Variant::SingleTime) => &[Ade, TimeEntity],
        (CapabilityKind::TemporalOrder, Variant::DoubleTime) => {
            &[Ade, TimeEntitySmall, TimeEntityLarge]
        }
        (CapabilityKind::PositiveSentiment, _) => &[MildAde],
        (CapabilityKind::Negation, _) => &[Ade],
        _ => &[],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Capability, Label};

    fn t(id: &str, base: &str, kind: CapabilityKind, variant: Variant, label: Label, text: &str) -> Template {
        Template::new(id, base, Capability::new(kind, variant), label, text).unwrap()
    }

    fn kinds(r: &ValidationReport) -> Vec<ViolationKind> {
        r.violations.iter().map(|v| v.kind).collect()
    }

    #[test]
    fn table5_totals() {
        let m = CorpusManifest::table5();
        assert_eq!(m.total_base(), 99);
        assert_eq!(m.total(), 1505);
    }

    #[test]
    fn mild_ade_in_negation_is_a_mismatch() {
        let ts = [t(
            "n",
            "n",
            CapabilityKind::Negation,
            Variant::None,
            Label::NoAde,
            "I took {drug} without {mild_ade} or {ade}.",
        )];
        let r = validate_corpus(&ts, None, &ValidateOptions::default());
        assert_eq!(kinds(&r), vec![ViolationKind::PlaceholderCapabilityMismatch]);
        assert_eq!(r.violations[0].kind.to_string(), "placeholder/capability mismatch");
    }

    #[test]
    fn label_variant_and_required_placeholders() {
        let ts = [
            t("p", "p", CapabilityKind::PositiveSentiment, Variant::None, Label::NoAde, "{drug} {mild_ade}"),
            t("s", "s", CapabilityKind::TemporalOrder, Variant::SingleTime, Label::Ade, "{drug} {ade}"),
            t("b", "b", CapabilityKind::BeneficialEffect, Variant::Standard, Label::Ade, "{drug}"),
        ];
        let r = validate_corpus(&ts, None, &ValidateOptions::default());
        assert_eq!(
            kinds(&r),
            vec![
                ViolationKind::IllegalLabel,
                ViolationKind::MissingPlaceholder,
                ViolationKind::IllegalVariant
            ]
        );
    }

    #[test]
    fn drugless_needs_flag() {
        let ts = [t("b", "b", CapabilityKind::BeneficialEffect, Variant::None, Label::Ade, "no drug here")];
        let r = validate_corpus(&ts, None, &ValidateOptions::default());
        assert_eq!(kinds(&r), vec![ViolationKind::MissingDrug]);
        let r = validate_corpus(&ts, None, &ValidateOptions { allow_drugless: true });
        assert!(r.is_ok());
    }

    #[test]
    fn variation_must_match_base() {
        let ts = [
            t("a", "a", CapabilityKind::Negation, Variant::None, Label::Ade, "not {drug} {ade}"),
            t("a-v01", "a", CapabilityKind::Negation, Variant::None, Label::NoAde, "not {drug} {ade}"),
            t("a-v02", "a", CapabilityKind::Negation, Variant::None, Label::Ade, "not {drug} {ade} {ade}"),
            t("a-v03", "a-v01", CapabilityKind::Negation, Variant::None, Label::NoAde, "not {drug} {ade}"),
            t("a-v04", "zz", CapabilityKind::Negation, Variant::None, Label::Ade, "not {drug} {ade}"),
        ];
        let r = validate_corpus(&ts, None, &ValidateOptions::default());
        assert_eq!(
            kinds(&r),
            vec![
                ViolationKind::VariationMismatch,
                ViolationKind::VariationMismatch,
                ViolationKind::BaseIsVariation,
                ViolationKind::DanglingBase
            ]
        );
    }

    #[test]
    fn count_mismatch_names_capability() {
        let ts = [t("a", "a", CapabilityKind::Negation, Variant::None, Label::Ade, "not {drug} {ade}")];
        let expected = CorpusManifest {
            rows: vec![
                ManifestRow { capability: CapabilityKind::Negation, base: 2, total: 2 },
                ManifestRow { capability: CapabilityKind::BeneficialEffect, base: 1, total: 1 },
            ],
        };
        let r = validate_corpus(&ts, Some(&expected), &ValidateOptions::default());
        assert_eq!(
            kinds(&r),
            vec![
                ViolationKind::CountMismatch,
                ViolationKind::MissingCapability,
                ViolationKind::CountMismatch
            ]
        );
        assert!(r.violations[0].message.starts_with("negation"));
    }
}
