pub mod error;
pub mod evaluation;
pub mod extraction;
pub mod generator;
pub mod jsonl;
pub mod lexicon;
pub mod runner;
pub mod sampling;
pub mod template_corpus;
pub mod types;

pub use types::{Capability, CapabilityKind, Label, PlaceholderKind, Variant};
