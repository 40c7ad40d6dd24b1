//! Regenerates `data/corpus.jsonl` from the base templates and the
//! variation vocabulary under `data/authoring/`.
//!
//!     cargo run -p capa-bench-core --example author_corpus

use std::path::Path;

use capa_bench::template_corpus::{
    author_corpus, serialize_corpus, shipped_authoring_inputs, validate_corpus, CorpusManifest,
    ValidateOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (bases, vocabulary) = shipped_authoring_inputs();
    let manifest = CorpusManifest::table5();
    let corpus = author_corpus(&bases, &vocabulary, &manifest)?;
    let report = validate_corpus(&corpus, Some(&manifest), &ValidateOptions::default());
    for v in &report.violations {
        eprintln!("{v}");
    }
    if !report.is_ok() {
        return Err("authored corpus does not validate".into());
    }
    let out = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus.jsonl");
    std::fs::write(&out, serialize_corpus(&corpus))?;
    println!("wrote {} templates to {}", corpus.len(), out.display());
    Ok(())
}
