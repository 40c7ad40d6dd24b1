//! Lexicon-lookup classifier used for dependency-free runs.

use crate::lexicon::Lexicon;
use crate::types::Label;

use super::{AdapterError, BatchClassifier, CaseRequest, Prediction};

pub const NEGATION_CUES: [&str; 4] = ["not", "without", "never", "no"];

/// ADE iff some ADE or mild-ADE entry occurs (case-insensitively) and no
/// negation cue occurs as a whole word.
#[derive(Debug, Clone)]
pub struct HeuristicClassifier {
    needles: Vec<String>,
}

impl HeuristicClassifier {
    pub fn new(lexicon: &Lexicon) -> Self {
        let needles = lexicon
            .ades
            .iter()
            .chain(&lexicon.mild_ades)
            .map(|s| s.to_lowercase())
            .collect();
        HeuristicClassifier { needles }
    }

    pub fn classify(&self, text: &str) -> Label {
        let lower = text.to_lowercase();
        let mentions_ade = self.needles.iter().any(|n| lower.contains(n.as_str()));
        if mentions_ade && !has_negation_cue(&lower) {
            Label::Ade
        } else {
            Label::NoAde
        }
    }
}

fn has_negation_cue(lower: &str) -> bool {
    lower
        .split(|c: char| !c.is_alphanumeric())
        .any(|w| NEGATION_CUES.contains(&w))
}

pub fn classify_heuristic(text: &str, lexicon: &Lexicon) -> Label {
    HeuristicClassifier::new(lexicon).classify(text)
}

impl BatchClassifier for HeuristicClassifier {
    fn classify_batch(&self, batch: &[CaseRequest]) -> Result<Vec<Prediction>, AdapterError> {
        Ok(batch
            .iter()
            .map(|c| Prediction::new(c.case_id.clone(), self.classify(&c.text)))
            .collect())
    }
}
