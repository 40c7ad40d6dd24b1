use std::collections::HashMap;
use std::sync::OnceLock;

use capa_bench::evaluation::{
    compare_to_baseline, evaluate, per_class_recall_equivalence, per_entity_breakdown, render_csv, render_json,
    render_markdown, BaselineMetrics, ClassMetrics, EvalOptions, PlotData, Ratio,
};
use capa_bench::generator::{build_suite, SamplingConfig, TestCase};
use capa_bench::lexicon::Lexicon;
use capa_bench::runner::Prediction;
use capa_bench::template_corpus::shipped_corpus;
use capa_bench::{Capability, CapabilityKind, Label, PlaceholderKind, Variant};
use proptest::prelude::*;

fn suite() -> &'static [TestCase] {
    static S: OnceLock<Vec<TestCase>> = OnceLock::new();
    S.get_or_init(|| {
        build_suite(&shipped_corpus(), &Lexicon::shipped(), &SamplingConfig::default())
            .unwrap()
            .cases
    })
}

fn predict(cases: &[TestCase], f: impl Fn(&TestCase) -> Label) -> Vec<Prediction> {
    cases.iter().map(|c| Prediction::new(c.case_id.clone(), f(c))).collect()
}

fn baseline(ade_r: f64, no_ade_r: f64) -> BaselineMetrics {
    let m = |r| ClassMetrics { p: 0.5, r, f1: 0.5 };
    BaselineMetrics::new("model", m(ade_r), m(no_ade_r)).unwrap()
}

/// Naive confusion-matrix counts per (capability, gold) test:
/// (gold, predicted) -> count.
fn confusion(cases: &[TestCase], preds: &[Prediction]) -> HashMap<(Capability, Label), HashMap<(Label, Label), usize>> {
    let mut m: HashMap<(Capability, Label), HashMap<(Label, Label), usize>> = HashMap::new();
    for c in cases {
        for p in preds {
            if p.case_id == c.case_id {
                *m.entry((c.capability, c.gold)).or_default().entry((c.gold, p.label)).or_default() += 1;
            }
        }
    }
    m
}

#[test]
fn oracle_and_anti_oracle() {
    let cases = suite();
    let oracle = evaluate(cases, &predict(cases, |c| c.gold), EvalOptions::default()).unwrap();
    assert_eq!(oracle.results.len(), 11);
    assert!(oracle.results.iter().all(|r| r.n_passed == r.n_cases));
    let anti = evaluate(cases, &predict(cases, |c| c.gold.flipped()), EvalOptions::default()).unwrap();
    assert!(anti.results.iter().all(|r| r.n_passed == 0));
    assert_eq!(oracle.histogram.counts[9], oracle.per_template.len());
    assert_eq!(anti.histogram.counts[0], anti.per_template.len());
}

#[test]
fn beneficial_effect_all_ade() {
    let cases = suite();
    let preds = predict(cases, |c| if c.capability.kind == CapabilityKind::BeneficialEffect { Label::Ade } else { c.gold });
    let r = evaluate(cases, &preds, EvalOptions::default()).unwrap();
    let be = Capability::new(CapabilityKind::BeneficialEffect, Variant::None);
    assert_eq!(r.result(be, Label::Ade).unwrap().ratio(), Ratio { passed: 120, total: 120 });
    assert_eq!(r.result(be, Label::NoAde).unwrap().ratio(), Ratio { passed: 0, total: 120 });
}

#[test]
fn baseline_deltas_and_worst() {
    let cases = suite();
    let single = Capability::new(CapabilityKind::TemporalOrder, Variant::SingleTime);
    let be = Capability::new(CapabilityKind::BeneficialEffect, Variant::None);
    // 945 / 1050 = 0.90 on the single-time ADE test; 7 / 120 ≈ 0.058 on
    // the beneficial-effect NO_ADE test; everything else correct.
    let mut seen_single = 0;
    let mut seen_be = 0;
    let preds: Vec<Prediction> = cases
        .iter()
        .map(|c| {
            let label = if c.capability == single && c.gold == Label::Ade {
                seen_single += 1;
                if seen_single <= 945 { c.gold } else { c.gold.flipped() }
            } else if c.capability == be && c.gold == Label::NoAde {
                seen_be += 1;
                if seen_be <= 7 { c.gold } else { c.gold.flipped() }
            } else {
                c.gold
            };
            Prediction::new(c.case_id.clone(), label)
        })
        .collect();
    let report = compare_to_baseline(evaluate(cases, &preds, EvalOptions::default()).unwrap(), &baseline(0.676, 0.975));
    let s = report.result(single, Label::Ade).unwrap();
    assert!((s.delta.unwrap() - 0.224).abs() < 1e-9);
    let w = report.worst().unwrap();
    assert_eq!((w.capability, w.label), (be, Label::NoAde));
    assert_eq!(format!("{:.3}", w.delta.unwrap()), "-0.917");

    let equal = compare_to_baseline(evaluate(cases, &predict(cases, |c| c.gold), EvalOptions::default()).unwrap(), &baseline(1.0, 1.0));
    assert!(equal.results.iter().all(|r| r.delta == Some(0.0)));

    let csv = render_csv(&report);
    assert!(csv.starts_with("capability,variant,label,n_cases,n_passed,pass_rate,baseline_recall,delta\n"));
    assert!(csv.contains("temporal_order,single_time,ade,1050,945,0.900,0.676,+0.224\n"));
    assert!(csv.contains("beneficial_effect,none,no_ade,120,7,0.058,0.975,-0.917\n"));
    assert_eq!(csv.lines().count(), 12);
    let md = render_markdown(&report);
    assert!(md.contains("Worst test: Beneficial Effect no_ade (-0.917)"));
    let json: serde_json::Value = serde_json::from_str(&render_json(&report)).unwrap();
    assert_eq!(json["worst"]["capability"], "beneficial_effect");
    assert_eq!(json["partial"], false);
    let plot = PlotData::of(&report);
    assert_eq!(plot.dots.len(), 11);
    assert_eq!(plot.histogram.len(), 10);
}

#[test]
fn report_without_baseline_has_no_deltas() {
    let cases = suite();
    let r = evaluate(cases, &predict(cases, |c| c.gold), EvalOptions::default()).unwrap();
    assert!(r.worst().is_none());
    assert!(r.results.iter().all(|t| t.delta.is_none()));
    assert!(!render_csv(&r).contains('+'));
}

#[test]
fn per_drug_counts() {
    let cases = suite();
    let b = per_entity_breakdown(cases, &predict(cases, |c| c.gold), PlaceholderKind::Drug, false).unwrap();
    let mut drugs: Vec<&str> = b.rows.iter().map(|r| r.entity.as_str()).collect();
    drugs.dedup();
    assert_eq!(drugs.len(), 5);
    for r in &b.rows {
        let want = match r.capability {
            CapabilityKind::TemporalOrder => 1440,
            CapabilityKind::PositiveSentiment => 540,
            CapabilityKind::BeneficialEffect => 48,
            CapabilityKind::Negation => 225,
        };
        assert_eq!(r.ratio, Ratio { passed: want, total: want });
    }
    assert_eq!(b.rows.iter().map(|r| r.ratio.total).sum::<usize>(), 11_265);
}

#[test]
fn per_template_mass_matches_passes() {
    let cases = suite();
    let preds = predict(cases, |c| if c.case_id.ends_with('3') { c.gold.flipped() } else { c.gold });
    let r = evaluate(cases, &preds, EvalOptions::default()).unwrap();
    let templ: usize = r.per_template.iter().map(|t| t.ratio.passed).sum();
    let tests: usize = r.results.iter().map(|t| t.n_passed).sum();
    assert_eq!(templ, tests);
    assert_eq!(r.histogram.counts.iter().sum::<usize>(), r.per_template.len());
}

fn random_preds(bits: &[bool]) -> Vec<Prediction> {
    suite()
        .iter()
        .zip(bits.iter().cycle())
        .map(|(c, &b)| Prediction::new(c.case_id.clone(), if b { Label::Ade } else { Label::NoAde }))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pass_rates_are_symmetric(bits in prop::collection::vec(any::<bool>(), 1..300)) {
        let cases = suite();
        let preds = random_preds(&bits);
        let flipped: Vec<Prediction> = preds.iter().map(|p| Prediction::new(p.case_id.clone(), p.label.flipped())).collect();
        let a = evaluate(cases, &preds, EvalOptions::default()).unwrap();
        let b = evaluate(cases, &flipped, EvalOptions::default()).unwrap();
        for (x, y) in a.results.iter().zip(&b.results) {
            prop_assert_eq!(x.n_cases, y.n_cases);
            prop_assert_eq!(x.n_passed + y.n_passed, x.n_cases);
        }
    }

    #[test]
    fn evaluation_ignores_prediction_order(bits in prop::collection::vec(any::<bool>(), 1..50), seed in any::<u64>()) {
        let cases = suite();
        let preds = random_preds(&bits);
        let mut shuffled = preds.clone();
        let n = shuffled.len();
        let mut s = seed | 1;
        for i in (1..n).rev() {
            s ^= s << 13; s ^= s >> 7; s ^= s << 17;
            shuffled.swap(i, (s % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(
            evaluate(cases, &preds, EvalOptions::default()).unwrap(),
            evaluate(cases, &shuffled, EvalOptions::default()).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn pass_rate_equals_brute_force_recall(
        picks in prop::collection::btree_set(0usize..11_265, 200),
        bits in prop::collection::vec(any::<bool>(), 200),
    ) {
        let all = suite();
        let cases: Vec<TestCase> = picks.iter().map(|&i| all[i].clone()).collect();
        let preds: Vec<Prediction> = cases
            .iter()
            .zip(&bits)
            .map(|(c, &b)| Prediction::new(c.case_id.clone(), if b { Label::Ade } else { Label::NoAde }))
            .collect();
        let report = evaluate(&cases, &preds, EvalOptions::default()).unwrap();
        let cm = confusion(&cases, &preds);
        prop_assert_eq!(report.results.len(), cm.len());
        for r in &report.results {
            let m = &cm[&(r.capability, r.label)];
            let tp = m.get(&(r.label, r.label)).copied().unwrap_or(0);
            let fneg = m.get(&(r.label, r.label.flipped())).copied().unwrap_or(0);
            prop_assert_eq!((r.n_passed, r.n_cases), (tp, tp + fneg));
        }
        let recall = per_class_recall_equivalence(&cases, &preds, false).unwrap();
        for label in Label::ALL {
            let tp: usize = cm.values().map(|m| m.get(&(label, label)).copied().unwrap_or(0)).sum();
            let total: usize = cases.iter().filter(|c| c.gold == label).count();
            let want = (total > 0).then_some(Ratio { passed: tp, total });
            prop_assert_eq!(recall[&label], want);
        }
    }
}
