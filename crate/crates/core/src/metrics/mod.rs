//! Evaluation metrics: token-level F1, lexical diversity and document
//! statistics, and general/sensitive n-gram recall.

mod diversity;
mod f1;
mod ngram;
mod stem;

pub use diversity::{document_stats, lexical_diversity, DiversityReport};
pub use f1::{token_f1, ClassScore, F1Report};
pub use ngram::{
    ngram_recall, ngram_recall_report, ngram_set, sensitive_ngram_recall, Granularity,
    NGramRecallReport,
};
pub use stem::{stem, STEMMER_VERSION};
