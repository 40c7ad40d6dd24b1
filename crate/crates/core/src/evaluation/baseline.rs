use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::Label;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassMetrics {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
}

/// Held-out metrics of the model under test, supplied by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineMetrics {
    pub model_name: String,
    pub per_class: BTreeMap<Label, ClassMetrics>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("baseline file: {0}")]
    Syntax(String),
    #[error("baseline has no metrics for class {0}")]
    MissingClass(Label),
    #[error("baseline {label} {metric} = {value} is outside [0, 1]")]
    OutOfRange {
        label: Label,
        metric: &'static str,
        value: f64,
    },
}

impl BaselineMetrics {
    pub fn new(model_name: impl Into<String>, ade: ClassMetrics, no_ade: ClassMetrics) -> Result<Self, BaselineError> {
        let b = BaselineMetrics {
            model_name: model_name.into(),
            per_class: BTreeMap::from([(Label::Ade, ade), (Label::NoAde, no_ade)]),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn parse(src: &str) -> Result<Self, BaselineError> {
        let b: BaselineMetrics = serde_json::from_str(src).map_err(|e| BaselineError::Syntax(e.to_string()))?;
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), BaselineError> {
        for label in Label::ALL {
            let m = self.per_class.get(&label).ok_or(BaselineError::MissingClass(label))?;
            for (metric, value) in [("p", m.p), ("r", m.r), ("f1", m.f1)] {
                if !(0.0..=1.0).contains(&value) {
                    return Err(BaselineError::OutOfRange { label, metric, value });
                }
            }
        }
        Ok(())
    }

    pub fn recall(&self, label: Label) -> f64 {
        self.per_class[&label].r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{"model_name":"m","per_class":{"ade":{"p":0.7,"r":0.676,"f1":0.69},"no_ade":{"p":0.96,"r":0.975,"f1":0.97}}}"#;

    #[test]
    fn parses_and_reads_recall() {
        let b = BaselineMetrics::parse(DOC).unwrap();
        assert_eq!(b.recall(Label::Ade), 0.676);
        assert_eq!(b.recall(Label::NoAde), 0.975);
    }

    #[test]
    fn rejects_out_of_range_and_missing() {
        let bad = DOC.replace("0.676", "1.2");
        assert!(matches!(BaselineMetrics::parse(&bad), Err(BaselineError::OutOfRange { metric: "r", .. })));
        let missing = r#"{"model_name":"m","per_class":{"ade":{"p":0.7,"r":0.6,"f1":0.6}}}"#;
        assert_eq!(BaselineMetrics::parse(missing), Err(BaselineError::MissingClass(Label::NoAde)));
        assert!(matches!(BaselineMetrics::parse("{"), Err(BaselineError::Syntax(_))));
    }
}
