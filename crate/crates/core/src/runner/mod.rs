//! Delivers suite cases to a classifier and joins predictions by case id.
//!
//! Cases are split into batches and sent by up to `max_in_flight` worker
//! threads. The control thread absorbs results as they arrive, so arrival
//! order does not matter. Cases still unanswered after a round (failed
//! batch or dropped ids) are requested again, up to `retry.attempts`
//! rounds, sleeping with exponential backoff between rounds.

mod file_batch;
mod heuristic;
mod http;
mod wire;

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Duration;

use thiserror::Error;

use crate::generator::TestCase;
use crate::jsonl;
use crate::lexicon::Lexicon;

pub use file_batch::{FileBatchExchange, REQUEST_FILE, RESPONSE_FILE};
pub use heuristic::{classify_heuristic, HeuristicClassifier, NEGATION_CUES};
pub use http::HttpClassifier;
pub use wire::{CaseRequest, ClassifyRequest, ClassifyResponse, Prediction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdapterError {
    #[error("adapter unreachable: {0}")]
    Unreachable(String),
    #[error("adapter returned HTTP {0}")]
    Status(u16),
    #[error("malformed adapter response: {0}")]
    Malformed(String),
    #[error("response file {} not found", .0.display())]
    ResponsesMissing(PathBuf),
    #[error("i/o error: {0}")]
    Io(String),
}

/// A classifier that labels a batch of cases. Implementations may return
/// predictions in any order and may omit cases; the driver re-requests them.
pub trait BatchClassifier: Sync {
    fn classify_batch(&self, batch: &[CaseRequest]) -> Result<Vec<Prediction>, AdapterError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    /// Total attempts, including the first.
    pub attempts: u32,
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            initial_backoff: Duration::from_secs(1),
        }
    }
}

impl RetryPolicy {
    /// Pause before attempt `attempt` (0-based); zero for the first.
    pub fn delay(&self, attempt: u32) -> Duration {
        match attempt {
            0 => Duration::ZERO,
            n => self.initial_backoff.saturating_mul(1 << (n - 1).min(20)),
        }
    }

    pub fn run<T>(&self, mut f: impl FnMut() -> Result<T, AdapterError>) -> Result<T, AdapterError> {
        let mut last = None;
        for attempt in 0..self.attempts.max(1) {
            std::thread::sleep(self.delay(attempt));
            match f() {
                Ok(v) => return Ok(v),
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdapterMode {
    /// The built-in lexicon heuristic.
    Heuristic,
    /// Exchange files in a directory.
    FileBatch(PathBuf),
    /// `POST <url>/classify`.
    Http(String),
}

impl FromStr for AdapterMode {
    type Err = String;

    /// `heuristic`, `file:<dir>`, `http:<url>` or a bare `http(s)://` URL.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "heuristic" {
            Ok(AdapterMode::Heuristic)
        } else if s.starts_with("http://") || s.starts_with("https://") {
            Ok(AdapterMode::Http(s.to_string()))
        } else if let Some(url) = s.strip_prefix("http:").filter(|u| !u.is_empty()) {
            Ok(AdapterMode::Http(url.to_string()))
        } else if let Some(dir) = s.strip_prefix("file:").filter(|d| !d.is_empty()) {
            Ok(AdapterMode::FileBatch(PathBuf::from(dir)))
        } else {
            Err(format!("unknown adapter {s:?}; expected heuristic, file:<dir> or http:<url>"))
        }
    }
}

impl fmt::Display for AdapterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdapterMode::Heuristic => f.write_str("heuristic"),
            AdapterMode::FileBatch(dir) => write!(f, "file:{}", dir.display()),
            AdapterMode::Http(url) => write!(f, "http:{url}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdapterSpec {
    pub mode: AdapterMode,
    pub batch_size: usize,
    pub max_in_flight: usize,
    /// Per-request timeout (HTTP only).
    pub timeout: Duration,
    pub retry: RetryPolicy,
}

impl AdapterSpec {
    pub fn new(mode: AdapterMode) -> Self {
        AdapterSpec {
            mode,
            batch_size: 64,
            max_in_flight: 4,
            timeout: Duration::from_secs(60),
            retry: RetryPolicy::default(),
        }
    }
}

/// Cases left without a prediction once retries are exhausted.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageGap {
    pub missing: Vec<String>,
    /// Predictions that did arrive, in suite order.
    pub partial: Vec<Prediction>,
    pub last_error: Option<AdapterError>,
}

impl fmt::Display for CoverageGap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 10;
        write!(f, "{} case(s) without prediction: ", self.missing.len())?;
        let head: Vec<&str> = self.missing.iter().take(SHOWN).map(String::as_str).collect();
        f.write_str(&head.join(", "))?;
        if self.missing.len() > SHOWN {
            write!(f, ", ...")?;
        }
        if let Some(e) = &self.last_error {
            write!(f, " (last error: {e})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("suite is empty")]
    EmptySuite,
    #[error("invalid adapter spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Adapter(AdapterError),
    #[error("duplicate prediction for case {0:?}")]
    DuplicatePrediction(String),
    #[error("prediction for unknown case {0:?}")]
    UnknownCase(String),
    #[error("prediction for case {0:?} has a score outside [0, 1]")]
    InvalidScore(String),
    #[error("coverage gap: {0}")]
    Coverage(CoverageGap),
}

/// Keyed assembly of predictions in suite order.
struct Join {
    index: HashMap<String, usize>,
    slots: Vec<Option<Prediction>>,
    filled: usize,
}

impl Join {
    fn new(cases: &[CaseRequest]) -> Self {
        Join {
            index: cases.iter().enumerate().map(|(i, c)| (c.case_id.clone(), i)).collect(),
            slots: vec![None; cases.len()],
            filled: 0,
        }
    }

    fn absorb(&mut self, preds: Vec<Prediction>) -> Result<(), RunError> {
        for p in preds {
            let &i = self
                .index
                .get(&p.case_id)
                .ok_or_else(|| RunError::UnknownCase(p.case_id.clone()))?;
            if !p.score_is_valid() {
                return Err(RunError::InvalidScore(p.case_id));
            }
            if self.slots[i].is_some() {
                return Err(RunError::DuplicatePrediction(p.case_id));
            }
            self.slots[i] = Some(p);
            self.filled += 1;
        }
        Ok(())
    }

    fn pending<'a>(&self, cases: &'a [CaseRequest]) -> Vec<&'a CaseRequest> {
        cases
            .iter()
            .zip(&self.slots)
            .filter(|(_, s)| s.is_none())
            .map(|(c, _)| c)
            .collect()
    }

    fn finish(self, cases: &[CaseRequest], last_error: Option<AdapterError>) -> Result<Vec<Prediction>, RunError> {
        if self.filled == cases.len() {
            return Ok(self.slots.into_iter().flatten().collect());
        }
        if self.filled == 0 {
            if let Some(e) = last_error {
                return Err(RunError::Adapter(e));
            }
        }
        let missing = self.pending(cases).into_iter().map(|c| c.case_id.clone()).collect();
        Err(RunError::Coverage(CoverageGap {
            missing,
            partial: self.slots.into_iter().flatten().collect(),
            last_error,
        }))
    }
}

fn check_spec(spec: &AdapterSpec) -> Result<(), RunError> {
    if spec.batch_size == 0 {
        return Err(RunError::InvalidSpec("batch_size must be at least 1".into()));
    }
    if spec.max_in_flight == 0 {
        return Err(RunError::InvalidSpec("max_in_flight must be at least 1".into()));
    }
    Ok(())
}

/// Runs `cases` through `classifier`; returns one prediction per case in
/// input order.
pub fn run_batches(
    cases: &[CaseRequest],
    classifier: &dyn BatchClassifier,
    spec: &AdapterSpec,
) -> Result<Vec<Prediction>, RunError> {
    check_spec(spec)?;
    if cases.is_empty() {
        return Err(RunError::EmptySuite);
    }
    let mut join = Join::new(cases);
    let mut last_error = None;
    for round in 0..spec.retry.attempts.max(1) {
        let pending: Vec<CaseRequest> = join.pending(cases).into_iter().cloned().collect();
        if pending.is_empty() {
            break;
        }
        std::thread::sleep(spec.retry.delay(round));
        let batches: Vec<&[CaseRequest]> = pending.chunks(spec.batch_size).collect();
        let next = AtomicUsize::new(0);
        let abort = AtomicBool::new(false);
        let workers = spec.max_in_flight.min(batches.len());
        let (tx, rx) = mpsc::channel();
        let outcome = std::thread::scope(|scope| {
            for _ in 0..workers {
                let tx = tx.clone();
                let (batches, next, abort) = (&batches, &next, &abort);
                scope.spawn(move || loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= batches.len() || abort.load(Ordering::Relaxed) {
                        break;
                    }
                    if tx.send(classifier.classify_batch(batches[i])).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            for result in rx {
                match result {
                    Ok(preds) => {
                        if let Err(e) = join.absorb(preds) {
                            abort.store(true, Ordering::Relaxed);
                            return Err(e);
                        }
                    }
                    Err(e) => last_error = Some(e),
                }
            }
            Ok(())
        });
        outcome?;
    }
    join.finish(cases, last_error)
}

/// Runs the file exchange once responses are available and joins them.
pub fn run_file_batch(
    cases: &[CaseRequest],
    exchange: &FileBatchExchange,
    retry: &RetryPolicy,
) -> Result<Vec<Prediction>, RunError> {
    if cases.is_empty() {
        return Err(RunError::EmptySuite);
    }
    let preds = exchange.exchange(cases, retry).map_err(RunError::Adapter)?;
    let mut join = Join::new(cases);
    join.absorb(preds)?;
    join.finish(cases, None)
}

/// Classifies every case of a suite with the adapter described by `spec`.
/// `lexicon` backs the heuristic adapter.
pub fn run_suite(cases: &[TestCase], spec: &AdapterSpec, lexicon: &Lexicon) -> Result<Vec<Prediction>, RunError> {
    let requests: Vec<CaseRequest> = cases.iter().map(CaseRequest::from).collect();
    match &spec.mode {
        AdapterMode::Heuristic => run_batches(&requests, &HeuristicClassifier::new(lexicon), spec),
        AdapterMode::Http(url) => run_batches(&requests, &HttpClassifier::new(url, spec.timeout), spec),
        AdapterMode::FileBatch(dir) => {
            check_spec(spec)?;
            run_file_batch(&requests, &FileBatchExchange::new(dir), &spec.retry)
        }
    }
}

pub fn write_predictions(preds: &[Prediction]) -> String {
    jsonl::write_records(preds)
}

pub fn read_predictions(src: &str) -> Result<Vec<Prediction>, jsonl::LineError> {
    Ok(jsonl::read_records(src)?.into_iter().map(|(_, p)| p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Label;
    use std::sync::Mutex;

    fn cases(n: usize) -> Vec<CaseRequest> {
        (0..n)
            .map(|i| CaseRequest { case_id: format!("c#{i:04}"), text: format!("text {i}") })
            .collect()
    }

    fn fast(batch_size: usize, max_in_flight: usize) -> AdapterSpec {
        AdapterSpec {
            batch_size,
            max_in_flight,
            retry: RetryPolicy { attempts: 3, initial_backoff: Duration::from_millis(1) },
            ..AdapterSpec::new(AdapterMode::Heuristic)
        }
    }

    struct Echo;
    impl BatchClassifier for Echo {
        fn classify_batch(&self, b: &[CaseRequest]) -> Result<Vec<Prediction>, AdapterError> {
            Ok(b.iter().rev().map(|c| Prediction::new(c.case_id.clone(), Label::Ade)).collect())
        }
    }

    /// Drops the given ids on every call.
    struct Dropper(Vec<String>);
    impl BatchClassifier for Dropper {
        fn classify_batch(&self, b: &[CaseRequest]) -> Result<Vec<Prediction>, AdapterError> {
            Ok(b.iter()
                .filter(|c| !self.0.contains(&c.case_id))
                .map(|c| Prediction::new(c.case_id.clone(), Label::NoAde))
                .collect())
        }
    }

    /// Fails the first `n` calls.
    struct Flaky(Mutex<u32>);
    impl BatchClassifier for Flaky {
        fn classify_batch(&self, b: &[CaseRequest]) -> Result<Vec<Prediction>, AdapterError> {
            let mut left = self.0.lock().unwrap();
            if *left > 0 {
                *left -= 1;
                return Err(AdapterError::Status(503));
            }
            Echo.classify_batch(b)
        }
    }

    struct Doubler;
    impl BatchClassifier for Doubler {
        fn classify_batch(&self, b: &[CaseRequest]) -> Result<Vec<Prediction>, AdapterError> {
            let mut out = Echo.classify_batch(b)?;
            out.push(out[0].clone());
            Ok(out)
        }
    }

    #[test]
    fn joins_in_input_order_regardless_of_arrival() {
        let cs = cases(1000);
        let preds = run_batches(&cs, &Echo, &fast(7, 8)).unwrap();
        let ids: Vec<&str> = preds.iter().map(|p| p.case_id.as_str()).collect();
        let want: Vec<&str> = cs.iter().map(|c| c.case_id.as_str()).collect();
        assert_eq!(ids, want);
    }

    #[test]
    fn dropped_responses_become_a_coverage_gap() {
        let cs = cases(50);
        let dropped = vec!["c#0003".to_string(), "c#0017".into(), "c#0042".into()];
        match run_batches(&cs, &Dropper(dropped.clone()), &fast(10, 2)) {
            Err(RunError::Coverage(gap)) => {
                assert_eq!(gap.missing, dropped);
                assert_eq!(gap.partial.len(), 47);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicates_are_rejected() {
        assert!(matches!(
            run_batches(&cases(5), &Doubler, &fast(5, 1)),
            Err(RunError::DuplicatePrediction(id)) if id == "c#0004"
        ));
    }

    #[test]
    fn transient_failures_are_retried() {
        let preds = run_batches(&cases(4), &Flaky(Mutex::new(2)), &fast(4, 1)).unwrap();
        assert_eq!(preds.len(), 4);
        assert!(matches!(
            run_batches(&cases(4), &Flaky(Mutex::new(3)), &fast(4, 1)),
            Err(RunError::Adapter(AdapterError::Status(503)))
        ));
    }

    #[test]
    fn unknown_ids_and_bad_scores_are_errors() {
        struct Stranger;
        impl BatchClassifier for Stranger {
            fn classify_batch(&self, _: &[CaseRequest]) -> Result<Vec<Prediction>, AdapterError> {
                Ok(vec![Prediction::new("zzz", Label::Ade)])
            }
        }
        assert_eq!(
            run_batches(&cases(1), &Stranger, &fast(1, 1)),
            Err(RunError::UnknownCase("zzz".into()))
        );
        struct Overconfident;
        impl BatchClassifier for Overconfident {
            fn classify_batch(&self, b: &[CaseRequest]) -> Result<Vec<Prediction>, AdapterError> {
                Ok(vec![Prediction { score: Some(1.5), ..Prediction::new(b[0].case_id.clone(), Label::Ade) }])
            }
        }
        assert!(matches!(run_batches(&cases(1), &Overconfident, &fast(1, 1)), Err(RunError::InvalidScore(_))));
    }

    #[test]
    fn spec_bounds() {
        assert!(matches!(run_batches(&cases(1), &Echo, &fast(0, 1)), Err(RunError::InvalidSpec(_))));
        assert!(matches!(run_batches(&cases(1), &Echo, &fast(1, 0)), Err(RunError::InvalidSpec(_))));
        assert_eq!(run_batches(&[], &Echo, &fast(1, 1)), Err(RunError::EmptySuite));
    }

    #[test]
    fn backoff_doubles() {
        let r = RetryPolicy::default();
        assert_eq!(
            [r.delay(0), r.delay(1), r.delay(2)],
            [Duration::ZERO, Duration::from_secs(1), Duration::from_secs(2)]
        );
    }

    #[test]
    fn adapter_mode_parsing() {
        assert_eq!("heuristic".parse(), Ok(AdapterMode::Heuristic));
        assert_eq!("file:out/x".parse(), Ok(AdapterMode::FileBatch("out/x".into())));
        assert_eq!("http:http://h:1".parse(), Ok(AdapterMode::Http("http://h:1".into())));
        assert_eq!("http://h:1".parse(), Ok(AdapterMode::Http("http://h:1".into())));
        assert!("grpc:x".parse::<AdapterMode>().is_err());
        assert!("file:".parse::<AdapterMode>().is_err());
    }
}
