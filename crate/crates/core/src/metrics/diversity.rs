//! Lexical diversity and per-document statistics.

use serde::{Deserialize, Serialize};

use super::stem::{stem, STEMMER_VERSION};
use crate::corpus::{Corpus, DocStats, Language};
use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    /// Unique stems divided by total tokens, over the whole corpus.
    pub lexical_diversity: f64,
    pub unique_stems: u64,
    pub total_tokens: u64,
    pub mean_doc_length: f64,
    pub std_doc_length: f64,
    pub mean_labels_per_doc: f64,
    pub std_labels_per_doc: f64,
    pub stemmer_version: String,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Mean and population standard deviation of document lengths and of non-"O"
/// label counts per document.
pub fn document_stats(corpus: &Corpus) -> Result<DocStats> {
    if corpus.is_empty() {
        return Err(Error::validation("document_stats requires a nonempty corpus"));
    }
    let lengths: Vec<f64> = corpus.documents.iter().map(|d| d.len() as f64).collect();
    let labels: Vec<f64> = corpus
        .documents
        .iter()
        .map(|d| d.labeled_token_count() as f64)
        .collect();
    let (mean_length, std_length) = mean_std(&lengths);
    let (mean_labels_per_doc, std_labels_per_doc) = mean_std(&labels);
    Ok(DocStats {
        mean_length,
        std_length,
        mean_labels_per_doc,
        std_labels_per_doc,
    })
}

/// Stems every token and reports unique-stem count over total tokens,
/// together with the document statistics.
pub fn lexical_diversity(corpus: &Corpus, language: Language) -> Result<DiversityReport> {
    if corpus.is_empty() || corpus.total_tokens() == 0 {
        return Err(Error::validation(
            "lexical_diversity requires a corpus with at least one token",
        ));
    }
    let mut stems = std::collections::HashSet::new();
    let mut total = 0u64;
    for doc in &corpus.documents {
        for token in &doc.tokens {
            stems.insert(stem(token, language));
            total += 1;
        }
    }
    let stats = document_stats(corpus)?;
    Ok(DiversityReport {
        lexical_diversity: stems.len() as f64 / total as f64,
        unique_stems: stems.len() as u64,
        total_tokens: total,
        mean_doc_length: stats.mean_length,
        std_doc_length: stats.std_length,
        mean_labels_per_doc: stats.mean_labels_per_doc,
        std_labels_per_doc: stats.std_labels_per_doc,
        stemmer_version: STEMMER_VERSION.to_string(),
    })
}
