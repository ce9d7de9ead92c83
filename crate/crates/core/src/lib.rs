//! Toolkit for generating, machine-annotating, and evaluating synthetic
//! training corpora for PII named-entity recognition.
//!
//! The pipeline mirrors the usual synthetic-data workflow: a gold corpus
//! trains a sequence tagger and a small language model; the language model
//! generates new text from validation-set prompts; the tagger machine-annotates
//! the generated text; a second tagger is trained on the synthetic corpus and
//! both are evaluated on held-out gold data. Utility (token-level F1),
//! diversity (stem-based), and privacy (n-gram recall) metrics are built in,
//! along with a remote-service protocol for swapping in full-scale models.

pub mod annotation;
pub mod corpus;
pub mod error;
pub mod generation;
pub mod metrics;
pub mod pipeline;
pub mod remote;
pub mod seed;

pub use corpus::{Corpus, Document, FoldPlan, Language, Prompt};
pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
