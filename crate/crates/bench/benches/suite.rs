use capa_bench::evaluation::{evaluate, EvalOptions};
use capa_bench::generator::{build_suite, SamplingConfig};
use capa_bench::lexicon::Lexicon;
use capa_bench::runner::{run_suite, AdapterMode, AdapterSpec, Prediction};
use capa_bench::template_corpus::shipped_corpus;
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn benches(c: &mut Criterion) {
    let corpus = shipped_corpus();
    let lexicon = Lexicon::shipped();
    let config = SamplingConfig::default();
    let cases = build_suite(&corpus, &lexicon, &config).unwrap().cases;
    let gold: Vec<Prediction> = cases.iter().map(|c| Prediction::new(c.case_id.clone(), c.gold)).collect();
    let spec = AdapterSpec::new(AdapterMode::Heuristic);

    c.bench_function("build_suite/default", |b| {
        b.iter(|| build_suite(black_box(&corpus), &lexicon, &config).unwrap())
    });
    c.bench_function("run_suite/heuristic", |b| {
        b.iter(|| run_suite(black_box(&cases), &spec, &lexicon).unwrap())
    });
    c.bench_function("evaluate/oracle", |b| {
        b.iter(|| evaluate(black_box(&cases), &gold, EvalOptions::default()).unwrap())
    });
}

criterion_group!(suite, benches);
criterion_main!(suite);
