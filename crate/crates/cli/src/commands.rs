use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{anyhow, Context};
use capa_bench::evaluation::{
    compare_to_baseline, evaluate as score, BaselineMetrics, EvalOptions, PlotData, ReportFormat,
};
use capa_bench::extraction::{default_tagsets, extract as filter_spans, parse_spans, parse_tagsets};
use capa_bench::generator::{build_suite, SamplingConfig, Suite};
use capa_bench::jsonl;
use capa_bench::lexicon::{load_lexicon, Lexicon};
use capa_bench::runner::{read_predictions, run_suite, write_predictions, AdapterMode, AdapterSpec, RetryPolicy, RunError};
use capa_bench::template_corpus::{
    parse_corpus, shipped_corpus_source, validate_corpus, CorpusManifest, Template, ValidateOptions,
};
use capa_bench::CapabilityKind;

use crate::manifest::{AdapterRecord, RunManifest};
use crate::{EvaluateArgs, ExtractArgs, GenerateArgs, RunArgs, ValidateArgs};

/// Command failure with its exit status: 1 for failed checks, 2 for I/O
/// and adapter problems.
#[derive(Debug)]
pub enum Failure {
    Check(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Io(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Check(e) | Failure::Io(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, body: &str) -> anyhow::Result<()> {
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

/// Source text and display name of the corpus, bundled when `path` is `None`.
fn corpus_source(path: Option<&Path>) -> anyhow::Result<(String, String)> {
    match path {
        Some(p) => Ok((read(p)?, p.display().to_string())),
        None => Ok((shipped_corpus_source().to_string(), "<bundled>".to_string())),
    }
}

fn load_corpus(source: &str, name: &str) -> Result<Vec<Template>, Failure> {
    parse_corpus(source).map_err(|e| Failure::Check(anyhow!("{name}: {e}")))
}

fn lexicon_source(path: Option<&Path>) -> anyhow::Result<(String, String)> {
    match path {
        Some(p) => Ok((read(p)?, p.display().to_string())),
        None => Ok((Lexicon::shipped_source().to_string(), "<bundled>".to_string())),
    }
}

fn parse_lexicon(source: &str, name: &str) -> Result<Lexicon, Failure> {
    load_lexicon(source).map_err(|e| Failure::Check(anyhow!("{name}: {e}")))
}

fn load_suite(path: &Path) -> Result<(String, Suite), Failure> {
    let text = read(path)?;
    let suite = Suite::from_jsonl(&text).map_err(|e| Failure::Check(anyhow!("{}: {e}", path.display())))?;
    Ok((text, suite))
}

pub fn validate(args: ValidateArgs) -> Outcome {
    let (source, name) = corpus_source(args.corpus.as_deref())?;
    let corpus = load_corpus(&source, &name)?;
    let expected = match args.manifest.as_deref() {
        None => None,
        Some("table5") => Some(CorpusManifest::table5()),
        Some(path) => {
            let text = read(Path::new(path))?;
            Some(serde_json::from_str(&text).with_context(|| format!("parsing manifest {path}"))?)
        }
    };
    let options = ValidateOptions { allow_drugless: args.allow_drugless };
    let report = validate_corpus(&corpus, expected.as_ref(), &options);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!("{name}: {} base templates, {} total", report.counts.total_base(), report.counts.total());
        for row in &report.counts.rows {
            println!("  {:<20} {:>4} {:>5}", row.capability.title(), row.base, row.total);
        }
        for v in &report.violations {
            println!("violation: {v}");
        }
    }
    if report.is_ok() {
        Ok(())
    } else {
        Err(Failure::Check(anyhow!("{} violation(s)", report.violations.len())))
    }
}

pub fn generate(args: GenerateArgs) -> Outcome {
    let (corpus_text, corpus_name) = corpus_source(args.corpus.as_deref())?;
    let (lexicon_text, lexicon_name) = lexicon_source(args.lexicon.as_deref())?;
    let config_text = args.config.as_deref().map(read).transpose()?;
    let mut config: SamplingConfig = match &config_text {
        Some(t) => serde_json::from_str(t).map_err(|e| Failure::Check(anyhow!("config: {e}")))?,
        None => SamplingConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let filter = args
        .capability
        .as_deref()
        .map(|c| c.parse::<CapabilityKind>().map_err(|e| Failure::Check(anyhow!(e))))
        .transpose()?;

    let mut manifest = RunManifest::new("generate", &args.out);
    manifest.corpus = Some(corpus_name.clone());
    manifest.lexicon = Some(lexicon_name.clone());
    manifest.config = Some(config.clone());
    manifest.capability = filter.map(|c| c.as_str().to_string());
    manifest.input("corpus", corpus_text.as_bytes());
    manifest.input("lexicon", lexicon_text.as_bytes());
    if let Some(t) = &config_text {
        manifest.input("config", t.as_bytes());
    }
    manifest.write()?;

    let corpus = load_corpus(&corpus_text, &corpus_name)?;
    let lexicon = parse_lexicon(&lexicon_text, &lexicon_name)?;
    let mut suite = build_suite(&corpus, &lexicon, &config).map_err(|e| Failure::Check(anyhow!(e)))?;
    if let Some(kind) = filter {
        suite.cases.retain(|c| c.capability.kind == kind);
    }
    write(&args.out.join("suite.jsonl"), &suite.to_jsonl())?;
    println!("{}", suite.counts());
    Ok(())
}

pub fn run(args: RunArgs) -> Outcome {
    let mode: AdapterMode = args.adapter.parse().map_err(|e: String| Failure::Io(anyhow!(e)))?;
    let (suite_text, suite) = load_suite(&args.suite)?;
    let (lexicon_text, lexicon_name) = lexicon_source(args.lexicon.as_deref())?;

    let mut manifest = RunManifest::new("run", &args.out);
    manifest.adapter = Some(AdapterRecord {
        mode: mode.to_string(),
        batch_size: args.batch_size,
        max_in_flight: args.max_in_flight,
        timeout_secs: args.timeout,
        attempts: args.attempts,
        backoff_ms: args.backoff_ms,
    });
    manifest.input("suite", suite_text.as_bytes());
    if mode == AdapterMode::Heuristic {
        manifest.lexicon = Some(lexicon_name.clone());
        manifest.input("lexicon", lexicon_text.as_bytes());
    }
    manifest.write()?;

    let lexicon = parse_lexicon(&lexicon_text, &lexicon_name)?;
    let spec = AdapterSpec {
        mode,
        batch_size: args.batch_size,
        max_in_flight: args.max_in_flight,
        timeout: Duration::from_secs(args.timeout),
        retry: RetryPolicy {
            attempts: args.attempts,
            initial_backoff: Duration::from_millis(args.backoff_ms),
        },
    };
    let out = args.out.join("predictions.jsonl");
    match run_suite(&suite.cases, &spec, &lexicon) {
        Ok(preds) => {
            write(&out, &write_predictions(&preds))?;
            println!("{} predictions written to {}", preds.len(), out.display());
            Ok(())
        }
        Err(RunError::Coverage(gap)) => {
            write(&out, &write_predictions(&gap.partial))?;
            Err(Failure::Io(anyhow!(
                "coverage gap: {gap}; partial predictions written to {}",
                out.display()
            )))
        }
        Err(e) => Err(Failure::Io(anyhow!(e))),
    }
}

pub fn evaluate(args: EvaluateArgs) -> Outcome {
    let format: ReportFormat = args.format.parse().map_err(|e: String| Failure::Check(anyhow!(e)))?;
    let (suite_text, suite) = load_suite(&args.suite)?;
    let pred_text = read(&args.predictions)?;
    let baseline_text = args.baseline.as_deref().map(read).transpose()?;

    if let Some(out) = &args.out {
        let mut manifest = RunManifest::new("evaluate", out);
        manifest.input("suite", suite_text.as_bytes());
        manifest.input("predictions", pred_text.as_bytes());
        if let Some(t) = &baseline_text {
            manifest.input("baseline", t.as_bytes());
        }
        manifest.write()?;
    }

    let preds = read_predictions(&pred_text)
        .map_err(|e| Failure::Check(anyhow!("{}:{}: {}", args.predictions.display(), e.line, e.source)))?;
    let baseline = baseline_text
        .as_deref()
        .map(BaselineMetrics::parse)
        .transpose()
        .map_err(|e| Failure::Check(anyhow!(e)))?;
    let options = EvalOptions { allow_partial: args.allow_partial, n_bins: Some(args.bins) };
    let mut report = score(&suite.cases, &preds, options).map_err(|e| Failure::Check(anyhow!(e)))?;
    if let Some(b) = &baseline {
        report = compare_to_baseline(report, b);
    }

    let rendered = format.render(&report);
    match &args.out {
        Some(out) => {
            let path = out.join(format!("report.{}", format.extension()));
            write(&path, &rendered)?;
            write(&out.join("plot.json"), &PlotData::of(&report).to_json())?;
            print!("{}", ReportFormat::Markdown.render(&report));
        }
        None => print!("{rendered}"),
    }
    Ok(())
}

pub fn extract(args: ExtractArgs) -> Outcome {
    let spans = parse_spans(&read(&args.spans)?).map_err(|e| Failure::Check(anyhow!("{}: {e}", args.spans.display())))?;
    let rules = match &args.tagsets {
        Some(p) => parse_tagsets(&read(p)?).map_err(|e| Failure::Check(anyhow!("{}: {e}", p.display())))?,
        None => default_tagsets(),
    };
    if rules.is_empty() {
        return Err(Failure::Check(anyhow!("no tagset rules")));
    }
    if args.max_len == 0 {
        return Err(Failure::Check(anyhow!("--max-len must be at least 1")));
    }
    let result = filter_spans(&spans, &rules, args.max_len);
    let mut accepted = result.accepted.join("\n");
    if !accepted.is_empty() {
        accepted.push('\n');
    }
    match &args.out {
        Some(p) => write(p, &accepted)?,
        None => print!("{accepted}"),
    }
    if let Some(p) = &args.rejections {
        write(p, &jsonl::write_records(&result.rejected))?;
    }
    eprintln!("{} accepted, {} rejected", result.accepted.len(), result.rejected.len());
    Ok(())
}
