//! Pass rates per capability test, baseline comparison and breakdowns by
//! template and by entity.
//!
//! A case passes when the predicted label equals the gold label. Every test
//! holds cases of a single gold label, so its pass rate is the recall of that
//! label restricted to the test.

mod baseline;
mod report;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::generator::{test_order, TestCase};
use crate::runner::Prediction;
use crate::types::{Capability, CapabilityKind, Label, PlaceholderKind};

pub use baseline::{BaselineError, BaselineMetrics, ClassMetrics};
pub use report::{render_csv, render_json, render_markdown, PlotData, ReportFormat};

pub const DEFAULT_BINS: usize = 10;

/// An exact count ratio. Decimal renderings use three places.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Ratio {
    pub passed: usize,
    pub total: usize,
}

impl Ratio {
    /// `None` when `total` is zero.
    pub fn value(self) -> Option<f64> {
        (self.total > 0).then(|| self.passed as f64 / self.total as f64)
    }

    fn add(&mut self, passed: bool) {
        self.total += 1;
        self.passed += usize::from(passed);
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v:.3}"),
            None => f.write_str("n/a"),
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Ratio", 3)?;
        st.serialize_field("passed", &self.passed)?;
        st.serialize_field("total", &self.total)?;
        st.serialize_field("rate", &self.value().map(round3))?;
        st.end()
    }
}

pub(crate) fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub capability: Capability,
    pub label: Label,
    pub n_cases: usize,
    pub n_passed: usize,
    /// Baseline recall of `label`, once compared.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_recall: Option<f64>,
    /// `pass_rate - baseline_recall`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl TestResult {
    pub fn ratio(&self) -> Ratio {
        Ratio { passed: self.n_passed, total: self.n_cases }
    }

    /// Tests are never empty, so the rate always exists.
    pub fn pass_rate(&self) -> f64 {
        self.ratio().value().expect("tests hold at least one case")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemplateResult {
    pub template_id: String,
    pub capability: Capability,
    pub label: Label,
    pub ratio: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub n_bins: usize,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Left edge of bin `i`; bins are `[i/n, (i+1)/n)` except the last,
    /// which includes 1.
    pub fn lower_edge(&self, i: usize) -> f64 {
        i as f64 / self.n_bins as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityResult {
    pub entity: String,
    pub capability: CapabilityKind,
    pub ratio: Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityBreakdown {
    pub kind: PlaceholderKind,
    /// Sorted by entity, then capability.
    pub rows: Vec<EntityResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    /// Set when some cases had no prediction; rates cover answered cases.
    pub partial: bool,
    pub n_cases: usize,
    pub n_answered: usize,
    pub results: Vec<TestResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineMetrics>,
    pub recall: BTreeMap<Label, Option<Ratio>>,
    pub per_template: Vec<TemplateResult>,
    pub histogram: Histogram,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_drug: Option<EntityBreakdown>,
}

impl SuiteReport {
    /// The result furthest below its baseline, once compared.
    pub fn worst(&self) -> Option<&TestResult> {
        self.results
            .iter()
            .filter(|r| r.delta.is_some())
            .fold(None, |best: Option<&TestResult>, r| match best {
                Some(b) if b.delta <= r.delta => Some(b),
                _ => Some(r),
            })
    }

    pub fn result(&self, capability: Capability, label: Label) -> Option<&TestResult> {
        self.results.iter().find(|r| r.capability == capability && r.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("prediction for unknown case {0:?}")]
    UnknownCase(String),
    #[error("duplicate prediction for case {0:?}")]
    DuplicatePrediction(String),
    #[error("{missing} case(s) have no prediction (first: {first:?}); pass --allow-partial to evaluate anyway")]
    Incomplete { missing: usize, first: String },
    #[error("placeholder {{{0}}} does not occur in the suite")]
    KindAbsent(PlaceholderKind),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub allow_partial: bool,
    pub n_bins: Option<usize>,
}

/// Per case: `Some(passed)` or `None` when unanswered.
fn outcomes(cases: &[TestCase], preds: &[Prediction], allow_partial: bool) -> Result<Vec<Option<bool>>, EvalError> {
    let index: HashMap<&str, usize> = cases.iter().enumerate().map(|(i, c)| (c.case_id.as_str(), i)).collect();
    let mut out: Vec<Option<bool>> = vec![None; cases.len()];
    for p in preds {
        let &i = index
            .get(p.case_id.as_str())
            .ok_or_else(|| EvalError::UnknownCase(p.case_id.clone()))?;
        if out[i].is_some() {
            return Err(EvalError::DuplicatePrediction(p.case_id.clone()));
        }
        out[i] = Some(p.label == cases[i].gold);
    }
    if !allow_partial {
        if let Some(i) = out.iter().position(Option::is_none) {
            return Err(EvalError::Incomplete {
                missing: out.iter().filter(|o| o.is_none()).count(),
                first: cases[i].case_id.clone(),
            });
        }
    }
    Ok(out)
}

fn answered<'a>(cases: &'a [TestCase], outs: &'a [Option<bool>]) -> impl Iterator<Item = (&'a TestCase, bool)> {
    cases.iter().zip(outs).filter_map(|(c, o)| o.map(|p| (c, p)))
}

/// Scores `predictions` against `cases`. Tests with no answered case are
/// omitted.
pub fn evaluate(cases: &[TestCase], predictions: &[Prediction], opts: EvalOptions) -> Result<SuiteReport, EvalError> {
    let outs = outcomes(cases, predictions, opts.allow_partial)?;
    let n_answered = outs.iter().filter(|o| o.is_some()).count();

    let mut by_test: HashMap<(Capability, Label), Ratio> = HashMap::new();
    let mut recall: BTreeMap<Label, Ratio> = BTreeMap::new();
    let mut by_template: BTreeMap<&str, (Capability, Label, Ratio)> = BTreeMap::new();
    for (c, passed) in answered(cases, &outs) {
        by_test.entry((c.capability, c.gold)).or_default().add(passed);
        recall.entry(c.gold).or_default().add(passed);
        by_template
            .entry(c.template_id.as_str())
            .or_insert((c.capability, c.gold, Ratio::default()))
            .2
            .add(passed);
    }

    let results = test_order()
        .filter_map(|key| {
            by_test.get(&key).map(|r| TestResult {
                capability: key.0,
                label: key.1,
                n_cases: r.total,
                n_passed: r.passed,
                baseline_recall: None,
                delta: None,
            })
        })
        .collect();
    let per_template: Vec<TemplateResult> = by_template
        .into_iter()
        .map(|(id, (capability, label, ratio))| TemplateResult {
            template_id: id.to_string(),
            capability,
            label,
            ratio,
        })
        .collect();
    let histogram = per_template_histogram(&per_template, opts.n_bins.unwrap_or(DEFAULT_BINS));
    let per_drug = breakdown(cases, &outs, PlaceholderKind::Drug).ok();

    Ok(SuiteReport {
        partial: n_answered < cases.len(),
        n_cases: cases.len(),
        n_answered,
        results,
        baseline: None,
        recall: Label::ALL.into_iter().map(|l| (l, recall.get(&l).copied())).collect(),
        per_template,
        histogram,
        per_drug,
    })
}

/// Recall of each gold label over the whole suite; `None` for a label with
/// no answered case.
pub fn per_class_recall_equivalence(
    cases: &[TestCase],
    predictions: &[Prediction],
    allow_partial: bool,
) -> Result<BTreeMap<Label, Option<Ratio>>, EvalError> {
    let outs = outcomes(cases, predictions, allow_partial)?;
    let mut recall: BTreeMap<Label, Ratio> = BTreeMap::new();
    for (c, passed) in answered(cases, &outs) {
        recall.entry(c.gold).or_default().add(passed);
    }
    Ok(Label::ALL.into_iter().map(|l| (l, recall.get(&l).copied())).collect())
}

/// Fills in baseline recall and delta for every result.
pub fn compare_to_baseline(mut report: SuiteReport, baseline: &BaselineMetrics) -> SuiteReport {
    for r in &mut report.results {
        let recall = baseline.recall(r.label);
        r.baseline_recall = Some(recall);
        r.delta = Some(r.pass_rate() - recall);
    }
    report.baseline = Some(baseline.clone());
    report
}

/// Counts templates by pass ratio in `n_bins` equal bins over `[0, 1]`.
/// A zero `n_bins` is treated as one bin. Templates with no answered case
/// are skipped.
pub fn per_template_histogram(templates: &[TemplateResult], n_bins: usize) -> Histogram {
    let n_bins = n_bins.max(1);
    let mut counts = vec![0; n_bins];
    for t in templates.iter().filter(|t| t.ratio.total > 0) {
        // Integer form of floor(ratio * n_bins), clamped so 1.0 lands last.
        let bin = (t.ratio.passed * n_bins / t.ratio.total).min(n_bins - 1);
        counts[bin] += 1;
    }
    Histogram { n_bins, counts }
}

fn breakdown(cases: &[TestCase], outs: &[Option<bool>], kind: PlaceholderKind) -> Result<EntityBreakdown, EvalError> {
    let mut groups: BTreeMap<(&str, CapabilityKind), Ratio> = BTreeMap::new();
    let mut present = false;
    for (c, o) in cases.iter().zip(outs) {
        let Some(entity) = c.fills.get(kind.name()) else { continue };
        present = true;
        let r = groups.entry((entity.as_str(), c.capability.kind)).or_default();
        if let Some(passed) = *o {
            r.add(passed);
        }
    }
    if !present {
        return Err(EvalError::KindAbsent(kind));
    }
    let rows = groups
        .into_iter()
        .map(|((entity, capability), ratio)| EntityResult {
            entity: entity.to_string(),
            capability,
            ratio,
        })
        .collect();
    Ok(EntityBreakdown { kind, rows })
}

/// Pass rates per (entity filling `kind`, capability).
pub fn per_entity_breakdown(
    cases: &[TestCase],
    predictions: &[Prediction],
    kind: PlaceholderKind,
    allow_partial: bool,
) -> Result<EntityBreakdown, EvalError> {
    let outs = outcomes(cases, predictions, allow_partial)?;
    breakdown(cases, &outs, kind)
}
