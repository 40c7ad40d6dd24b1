//! Wire records shared by the file-batch and HTTP adapters.
//!
//! Request line / item: `{"case_id": .., "text": ..}`.
//! Response line / item: `{"case_id": .., "label": "ade" | "no_ade", "score"?: 0..=1}`.
//! HTTP bodies wrap these as `{"cases": [..]}` and `{"predictions": [..]}`.

use serde::{Deserialize, Serialize};

use crate::generator::TestCase;
use crate::types::Label;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseRequest {
    pub case_id: String,
    pub text: String,
}

impl From<&TestCase> for CaseRequest {
    fn from(c: &TestCase) -> Self {
        CaseRequest {
            case_id: c.case_id.clone(),
            text: c.text.clone(),
        }
    }
}

/// One classifier decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prediction {
    pub case_id: String,
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

impl Prediction {
    pub fn new(case_id: impl Into<String>, label: Label) -> Self {
        Prediction {
            case_id: case_id.into(),
            label,
            score: None,
        }
    }

    /// Score, when present, must be finite and within `[0, 1]`.
    pub fn score_is_valid(&self) -> bool {
        self.score.is_none_or(|s| (0.0..=1.0).contains(&s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyRequest {
    pub cases: Vec<CaseRequest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyResponse {
    pub predictions: Vec<Prediction>,
}
