//! Report renderings: full JSON document, one CSV row per test, a markdown
//! summary and plot coordinates.

use std::str::FromStr;

use serde::Serialize;

use super::{round3, SuiteReport};
use crate::types::{CapabilityKind, Label, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }

    pub fn render(self, report: &SuiteReport) -> String {
        match self {
            ReportFormat::Json => render_json(report),
            ReportFormat::Csv => render_csv(report),
            ReportFormat::Markdown => render_markdown(report),
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            _ => Err(format!("unknown report format {s:?}; expected json, csv or md")),
        }
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    #[serde(flatten)]
    report: &'a SuiteReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst: Option<WorstRef>,
}

#[derive(Serialize)]
struct WorstRef {
    capability: CapabilityKind,
    variant: Variant,
    label: Label,
    delta: f64,
}

pub fn render_json(report: &SuiteReport) -> String {
    let worst = report.worst().map(|w| WorstRef {
        capability: w.capability.kind,
        variant: w.capability.variant,
        label: w.label,
        delta: w.delta.unwrap_or_default(),
    });
    let mut s = serde_json::to_string_pretty(&JsonReport { report, worst }).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct CsvRow {
    capability: CapabilityKind,
    variant: Variant,
    label: Label,
    n_cases: usize,
    n_passed: usize,
    pass_rate: String,
    baseline_recall: String,
    delta: String,
}

fn fixed3(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.3}")).unwrap_or_default()
}

fn signed3(v: Option<f64>) -> String {
    v.map(|v| format!("{:+.3}", round3(v) + 0.0)).unwrap_or_default()
}

pub fn render_csv(report: &SuiteReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.results {
        w.serialize(CsvRow {
            capability: r.capability.kind,
            variant: r.capability.variant,
            label: r.label,
            n_cases: r.n_cases,
            n_passed: r.n_passed,
            pass_rate: r.ratio().to_string(),
            baseline_recall: fixed3(r.baseline_recall),
            delta: signed3(r.delta),
        })
        .expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn render_markdown(report: &SuiteReport) -> String {
    let mut out = String::new();
    if let Some(b) = &report.baseline {
        out.push_str(&format!("Baseline: {}\n\n", b.model_name));
    }
    if report.partial {
        out.push_str(&format!(
            "Partial run: {} of {} cases answered.\n\n",
            report.n_answered, report.n_cases
        ));
    }
    out.push_str("| Test | Label | Cases | Passed | Pass rate | Baseline recall | Delta |\n");
    out.push_str("|---|---|---:|---:|---:|---:|---:|\n");
    for r in &report.results {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            r.capability.title(),
            r.label,
            r.n_cases,
            r.n_passed,
            r.ratio(),
            fixed3(r.baseline_recall),
            signed3(r.delta),
        ));
    }
    out.push('\n');
    for (label, ratio) in &report.recall {
        let shown = ratio.map_or("n/a".to_string(), |r| r.to_string());
        out.push_str(&format!("Recall {label}: {shown}\n"));
    }
    if let Some(w) = report.worst() {
        out.push_str(&format!(
            "Worst test: {} {} ({})\n",
            w.capability.title(),
            w.label,
            signed3(w.delta)
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DotPoint {
    pub test: String,
    pub label: Label,
    pub pass_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Coordinates for a per-test dot plot and the per-template histogram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotData {
    pub dots: Vec<DotPoint>,
    pub histogram: Vec<HistogramBin>,
}

impl PlotData {
    pub fn of(report: &SuiteReport) -> Self {
        let dots = report
            .results
            .iter()
            .map(|r| DotPoint {
                test: r.capability.title(),
                label: r.label,
                pass_rate: round3(r.pass_rate()),
                baseline_recall: r.baseline_recall,
            })
            .collect();
        let h = &report.histogram;
        let histogram = h
            .counts
            .iter()
            .enumerate()
            .map(|(i, &count)| HistogramBin {
                lower: h.lower_edge(i),
                upper: h.lower_edge(i + 1),
                count,
            })
            .collect();
        PlotData { dots, histogram }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plot data serializes");
        s.push('\n');
        s
    }
}
