use thiserror::Error;

/// A name that is not part of a closed vocabulary (label, capability, ...).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {what} {value:?}")]
pub struct UnknownName {
    pub what: &'static str,
    pub value: String,
}

impl UnknownName {
    pub fn new(what: &'static str, value: &str) -> Self {
        UnknownName {
            what,
            value: value.to_string(),
        }
    }
}
