//! Air-gapped exchange through a directory: the runner writes
//! `requests.jsonl` and reads `responses.jsonl` written by an external
//! process.

use std::fs;
use std::path::{Path, PathBuf};

use crate::jsonl;

use super::{AdapterError, CaseRequest, Prediction, RetryPolicy};

pub const REQUEST_FILE: &str = "requests.jsonl";
pub const RESPONSE_FILE: &str = "responses.jsonl";

#[derive(Debug, Clone)]
pub struct FileBatchExchange {
    dir: PathBuf,
}

impl FileBatchExchange {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FileBatchExchange { dir: dir.into() }
    }

    pub fn request_path(&self) -> PathBuf {
        self.dir.join(REQUEST_FILE)
    }

    pub fn response_path(&self) -> PathBuf {
        self.dir.join(RESPONSE_FILE)
    }

    /// Writes the request file, leaving it untouched when the content is
    /// already identical.
    pub fn write_requests(&self, cases: &[CaseRequest]) -> Result<(), AdapterError> {
        fs::create_dir_all(&self.dir).map_err(|e| io_err(&self.dir, e))?;
        let body = jsonl::write_records(cases);
        let path = self.request_path();
        if fs::read_to_string(&path).is_ok_and(|old| old == body) {
            return Ok(());
        }
        fs::write(&path, body).map_err(|e| io_err(&path, e))
    }

    /// Reads the response file once.
    pub fn read_responses(&self) -> Result<Vec<Prediction>, AdapterError> {
        let path = self.response_path();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(AdapterError::ResponsesMissing(path));
            }
            Err(e) => return Err(io_err(&path, e)),
        };
        jsonl::read_records::<Prediction>(&text)
            .map(|rs| rs.into_iter().map(|(_, p)| p).collect())
            .map_err(|e| AdapterError::Malformed(format!("{}:{}: {}", path.display(), e.line, e.source)))
    }

    /// Writes requests, then polls for responses under `retry`.
    pub fn exchange(&self, cases: &[CaseRequest], retry: &RetryPolicy) -> Result<Vec<Prediction>, AdapterError> {
        self.write_requests(cases)?;
        retry.run(|| self.read_responses())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> AdapterError {
    AdapterError::Io(format!("{}: {e}", path.display()))
}
