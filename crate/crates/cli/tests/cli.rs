use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_capa-bench"));
    c.env_remove("CAPA_BENCH_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_shipped_corpus_against_table() {
    let o = run(&["validate", "--manifest", "table5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("99 base templates, 1505 total"));
}

#[test]
fn validate_reports_missing_capability() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    let only_neg: String = capa_lines().into_iter().filter(|l| l.contains(r#""capability":"negation""#)).collect();
    fs::write(&corpus, only_neg).unwrap();
    let o = run(&["validate", "--corpus", p(&corpus), "--manifest", "table5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("missing capability"));
}

fn capa_lines() -> Vec<String> {
    fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/corpus.jsonl"))
        .unwrap()
        .lines()
        .map(|l| format!("{l}\n"))
        .collect()
}

#[test]
fn generate_is_deterministic_and_counts_match() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = run(&["generate", "--seed", "7", "--out", p(&a)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("11265"));
    assert!(run(&["generate", "--seed", "7", "--out", p(&b)]).status.success());
    let sa = fs::read(a.join("suite.jsonl")).unwrap();
    assert_eq!(sa, fs::read(b.join("suite.jsonl")).unwrap());
    assert_eq!(sa.iter().filter(|&&c| c == b'\n').count(), 11_265);
    let ma = fs::read_to_string(a.join("generate.manifest.json")).unwrap();
    assert!(ma.contains(r#""seed": 7"#));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = bin().args(["generate", "--out", p(&out)]).env("CAPA_BENCH_SEED", "42").output().unwrap();
    assert!(o.status.success());
    assert!(fs::read_to_string(out.join("generate.manifest.json")).unwrap().contains(r#""seed": 42"#));
}

#[test]
fn capability_filter() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    assert!(run(&["generate", "--capability", "negation", "--out", p(&out)]).status.success());
    let suite = fs::read_to_string(out.join("suite.jsonl")).unwrap();
    assert_eq!(suite.lines().count(), 1_125);
    assert!(run(&["generate", "--capability", "sarcasm", "--out", p(&out)]).status.code() == Some(1));
}

#[test]
fn heuristic_pipeline_with_and_without_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    let r = dir.path().join("r");
    let e = dir.path().join("e");
    assert!(run(&["generate", "--capability", "negation", "--out", p(&g)]).status.success());
    let suite = g.join("suite.jsonl");
    let o = run(&["run", "--suite", p(&suite), "--adapter", "heuristic", "--out", p(&r)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let preds = r.join("predictions.jsonl");
    assert_eq!(fs::read_to_string(&preds).unwrap().lines().count(), 1_125);

    let o = run(&["evaluate", "--suite", p(&suite), "--predictions", p(&preds), "--format", "csv"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.contains("negation,none,no_ade,825,825,1.000,,\n"), "{csv}");
    assert!(csv.contains("negation,none,ade,300,0,0.000,,\n"));

    let baseline = dir.path().join("b.json");
    fs::write(
        &baseline,
        r#"{"model_name":"m","per_class":{"ade":{"p":0.7,"r":0.676,"f1":0.69},"no_ade":{"p":0.96,"r":0.975,"f1":0.97}}}"#,
    )
    .unwrap();
    let o = run(&[
        "evaluate", "--suite", p(&suite), "--predictions", p(&preds), "--baseline", p(&baseline), "--format", "json",
        "--out", p(&e),
    ]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(e.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["worst"]["label"], "ade");
    assert!(e.join("plot.json").exists());
    assert!(e.join("evaluate.manifest.json").exists());
}

#[test]
fn incomplete_predictions_need_allow_partial() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    assert!(run(&["generate", "--capability", "negation", "--out", p(&g)]).status.success());
    let suite = g.join("suite.jsonl");
    let text = fs::read_to_string(&suite).unwrap();
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    let preds = dir.path().join("p.jsonl");
    fs::write(&preds, format!("{{\"case_id\":{},\"label\":\"no_ade\"}}\n", first["case_id"])).unwrap();
    let o = run(&["evaluate", "--suite", p(&suite), "--predictions", p(&preds)]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["evaluate", "--suite", p(&suite), "--predictions", p(&preds), "--allow-partial", "--format", "json"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(r#""partial": true"#));
}

#[test]
fn missing_file_batch_responses_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    assert!(run(&["generate", "--capability", "negation", "--out", p(&g)]).status.success());
    let xchg = dir.path().join("x");
    let adapter = format!("file:{}", p(&xchg));
    let o = run(&[
        "run", "--suite", p(&g.join("suite.jsonl")), "--adapter", &adapter, "--backoff-ms", "1", "--out",
        p(&dir.path().join("r")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fs::read_to_string(xchg.join("requests.jsonl")).unwrap().lines().count(), 1_125);
    assert!(dir.path().join("r/run.manifest.json").exists());
}

#[test]
fn missing_input_exits_2() {
    let o = run(&["evaluate", "--suite", "/nonexistent/s.jsonl", "--predictions", "/nonexistent/p.jsonl"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn extract_documented_examples() {
    let dir = tempfile::tempdir().unwrap();
    let spans = dir.path().join("spans.txt");
    fs::write(
        &spans,
        "listlessness_NOUN\ngained_VERB 18_NUM pound_NOUN\nrecurrence_NOUN of_ADP ocular_ADJ migraines_NOUN\n",
    )
    .unwrap();
    let rej = dir.path().join("rej.jsonl");
    let o = run(&["extract", "--spans", p(&spans), "--rejections", p(&rej)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "listlessness\nrecurrence of ocular migraines\n");
    assert!(fs::read_to_string(&rej).unwrap().contains(r#""reason":"not-NP""#));
}
