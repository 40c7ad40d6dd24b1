use capa_bench::generator::{build_suite, CountTable, SamplingConfig};
use capa_bench::lexicon::Lexicon;
use capa_bench::template_corpus::shipped_corpus;

#[test]
fn default_suite_matches_published_counts() {
    let suite = build_suite(&shipped_corpus(), &Lexicon::shipped(), &SamplingConfig::default()).unwrap();
    let counts = suite.counts();
    println!("{counts}");
    assert_eq!(counts.diff(&CountTable::expected_default()), Vec::<String>::new());
    assert_eq!(counts.total(), 11_265);
}
