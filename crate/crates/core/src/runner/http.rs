use std::time::Duration;

use super::{AdapterError, BatchClassifier, CaseRequest, ClassifyRequest, ClassifyResponse, Prediction};

/// Client for a service implementing `POST /classify`.
pub struct HttpClassifier {
    agent: ureq::Agent,
    url: String,
}

impl HttpClassifier {
    /// `base` is the service root; `/classify` is appended unless present.
    pub fn new(base: &str, timeout: Duration) -> Self {
        let base = base.trim_end_matches('/');
        let url = if base.ends_with("/classify") {
            base.to_string()
        } else {
            format!("{base}/classify")
        };
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpClassifier { agent, url }
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

impl BatchClassifier for HttpClassifier {
    fn classify_batch(&self, batch: &[CaseRequest]) -> Result<Vec<Prediction>, AdapterError> {
        let body = ClassifyRequest { cases: batch.to_vec() };
        let mut resp = self
            .agent
            .post(&self.url)
            .send_json(&body)
            .map_err(|e| AdapterError::Unreachable(format!("{}: {e}", self.url)))?;
        let status = resp.status().as_u16();
        if status != 200 {
            return Err(AdapterError::Status(status));
        }
        let parsed: ClassifyResponse = resp
            .body_mut()
            .with_config()
            .limit(256 * 1024 * 1024)
            .read_json()
            .map_err(|e| AdapterError::Malformed(e.to_string()))?;
        Ok(parsed.predictions)
    }
}
