//! General and sensitive n-gram recall (Eq. 1 style): the fraction of a
//! reference corpus's unique n-grams that also occur in a candidate corpus.
//!
//! The sensitive subset R* keeps only reference n-grams whose token window
//! shares at least one position with a non-"O" labeled token — the strictest
//! defensible reading of "overlap with sensitive entities".

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::Error;
use crate::Result;

/// Unit an n-gram window slides over. Word granularity follows the paper's
/// token-level definition; character granularity slides over the characters
/// of each token sequence joined with single spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Word,
    Character,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NGramRecallReport {
    pub n: usize,
    pub granularity: Granularity,
    /// |R ∩ S| / |R|.
    pub general_recall: f64,
    /// |R* ∩ S| / |R*|; `None` when the reference has no sensitive n-grams.
    pub sensitive_recall: Option<f64>,
    pub reference_ngrams: u64,
    pub sensitive_ngrams: u64,
    pub candidate_ngrams: u64,
    pub overlap_ngrams: u64,
    pub sensitive_overlap_ngrams: u64,
}

/// Joins window units with an unlikely separator so ("ab","c") and ("a","bc")
/// stay distinct.
const SEP: &str = "\u{1f}";

fn word_windows(doc_tokens: &[String], n: usize) -> impl Iterator<Item = String> + '_ {
    doc_tokens.windows(n).map(|w| w.join(SEP))
}

fn char_units(doc_tokens: &[String]) -> Vec<String> {
    let joined = doc_tokens.join(" ");
    joined.chars().map(String::from).collect()
}

/// All unique within-document sliding windows of `n` units. Windows never
/// cross document boundaries; documents shorter than `n` contribute nothing.
pub fn ngram_set(corpus: &Corpus, n: usize, granularity: Granularity) -> Result<HashSet<String>> {
    if n == 0 {
        return Err(Error::validation("n-gram order must be at least 1"));
    }
    let mut set = HashSet::new();
    for doc in &corpus.documents {
        match granularity {
            Granularity::Word => set.extend(word_windows(&doc.tokens, n)),
            Granularity::Character => {
                let units = char_units(&doc.tokens);
                set.extend(units.windows(n).map(|w| w.join(SEP)));
            }
        }
    }
    Ok(set)
}

/// Sensitive reference windows: word windows sharing ≥1 position with a
/// non-"O" token. Character granularity marks the character positions covered
/// by labeled tokens; the joining spaces belong to no token.
fn sensitive_set(corpus: &Corpus, n: usize, granularity: Granularity) -> HashSet<String> {
    let mut set = HashSet::new();
    for doc in &corpus.documents {
        match granularity {
            Granularity::Word => {
                for (start, w) in doc.tokens.windows(n).enumerate() {
                    if doc.labels[start..start + n].iter().any(|l| l != "O") {
                        set.insert(w.join(SEP));
                    }
                }
            }
            Granularity::Character => {
                let units = char_units(&doc.tokens);
                let mut hot = vec![false; units.len()];
                let mut pos = 0usize;
                for (t, token) in doc.tokens.iter().enumerate() {
                    let len = token.chars().count();
                    if doc.labels[t] != "O" {
                        for h in &mut hot[pos..pos + len] {
                            *h = true;
                        }
                    }
                    pos += len + 1; // skip the joining space
                }
                for (start, w) in units.windows(n).enumerate() {
                    if hot[start..start + n].iter().any(|h| *h) {
                        set.insert(w.join(SEP));
                    }
                }
            }
        }
    }
    set
}

/// General recall |R∩S|/|R| plus, when the reference carries labels, the
/// sensitive part. An empty reference n-gram set is an error, never a silent
/// zero; an empty sensitive subset yields `sensitive_recall: None`.
pub fn ngram_recall_report(
    reference: &Corpus,
    candidate: &Corpus,
    n: usize,
    granularity: Granularity,
) -> Result<NGramRecallReport> {
    let r = ngram_set(reference, n, granularity)?;
    if r.is_empty() {
        return Err(Error::validation(format!(
            "reference corpus has no {n}-grams; recall is undefined"
        )));
    }
    let s = ngram_set(candidate, n, granularity)?;
    let r_star = sensitive_set(reference, n, granularity);
    debug_assert!(r_star.is_subset(&r));

    let overlap = r.intersection(&s).count() as u64;
    let sensitive_overlap = r_star.intersection(&s).count() as u64;
    let sensitive_recall = if r_star.is_empty() {
        None
    } else {
        Some(sensitive_overlap as f64 / r_star.len() as f64)
    };
    Ok(NGramRecallReport {
        n,
        granularity,
        general_recall: overlap as f64 / r.len() as f64,
        sensitive_recall,
        reference_ngrams: r.len() as u64,
        sensitive_ngrams: r_star.len() as u64,
        candidate_ngrams: s.len() as u64,
        overlap_ngrams: overlap,
        sensitive_overlap_ngrams: sensitive_overlap,
    })
}

/// Word-granularity general recall.
pub fn ngram_recall(reference: &Corpus, candidate: &Corpus, n: usize) -> Result<NGramRecallReport> {
    ngram_recall_report(reference, candidate, n, Granularity::Word)
}

/// Word-granularity recall that requires a nonempty sensitive subset.
pub fn sensitive_ngram_recall(
    reference: &Corpus,
    candidate: &Corpus,
    n: usize,
) -> Result<NGramRecallReport> {
    let report = ngram_recall_report(reference, candidate, n, Granularity::Word)?;
    if report.sensitive_recall.is_none() {
        return Err(Error::NoSensitiveNgrams);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Language};

    fn doc(id: &str, tokens: &[&str], labels: &[&str]) -> Document {
        Document::new(
            id,
            tokens.iter().map(|s| s.to_string()).collect(),
            labels.iter().map(|s| s.to_string()).collect(),
            Language::Sv,
        )
        .unwrap()
    }

    fn unlabeled(id: &str, tokens: &[&str]) -> Document {
        let labels = vec!["O"; tokens.len()];
        doc(id, tokens, &labels)
    }

    fn corpus(docs: Vec<Document>) -> Corpus {
        Corpus::from_documents(docs).unwrap()
    }

    #[test]
    fn four_token_doc_has_two_trigrams() {
        let c = corpus(vec![unlabeled("d", &["a", "b", "c", "d"])]);
        let set = ngram_set(&c, 3, Granularity::Word).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.contains(&["a", "b", "c"].join(SEP)));
        assert!(set.contains(&["b", "c", "d"].join(SEP)));
    }

    #[test]
    fn short_documents_contribute_nothing() {
        let c = corpus(vec![unlabeled("d", &["a", "b"])]);
        assert!(ngram_set(&c, 3, Granularity::Word).unwrap().is_empty());
    }

    #[test]
    fn windows_do_not_cross_documents() {
        let c = corpus(vec![unlabeled("a", &["a", "b"]), unlabeled("b", &["c", "d"])]);
        let set = ngram_set(&c, 2, Granularity::Word).unwrap();
        assert_eq!(set.len(), 2);
        assert!(!set.contains(&["b", "c"].join(SEP)));
    }

    #[test]
    fn separator_prevents_concatenation_collisions() {
        let c1 = corpus(vec![unlabeled("d", &["ab", "c"])]);
        let c2 = corpus(vec![unlabeled("d", &["a", "bc"])]);
        let s1 = ngram_set(&c1, 2, Granularity::Word).unwrap();
        let s2 = ngram_set(&c2, 2, Granularity::Word).unwrap();
        assert!(s1.is_disjoint(&s2));
    }

    #[test]
    fn identical_corpora_have_recall_one() {
        let c = corpus(vec![unlabeled("d", &["a", "b", "c", "d", "e"])]);
        let report = ngram_recall(&c, &c, 3).unwrap();
        assert_eq!(report.general_recall, 1.0);
    }

    #[test]
    fn disjoint_vocabularies_have_recall_zero() {
        let r = corpus(vec![unlabeled("d", &["a", "b", "c"])]);
        let s = corpus(vec![unlabeled("d", &["x", "y", "z"])]);
        assert_eq!(ngram_recall(&r, &s, 3).unwrap().general_recall, 0.0);
    }

    #[test]
    fn one_of_three_trigrams_found() {
        let r = corpus(vec![unlabeled("d", &["a", "b", "c", "d", "e"])]);
        let s = corpus(vec![unlabeled("d", &["b", "c", "d"])]);
        let report = ngram_recall(&r, &s, 3).unwrap();
        assert_eq!(report.reference_ngrams, 3);
        assert!((report.general_recall - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn too_short_reference_is_an_error() {
        let r = corpus(vec![unlabeled("d", &["a", "b"])]);
        let s = corpus(vec![unlabeled("d", &["a", "b", "c"])]);
        assert!(ngram_recall(&r, &s, 3).is_err());
    }

    #[test]
    fn fully_labeled_reference_makes_sensitive_equal_general() {
        let r = corpus(vec![doc(
            "d",
            &["a", "b", "c", "d"],
            &["B-N", "I-N", "B-N", "I-N"],
        )]);
        let s = corpus(vec![unlabeled("d", &["b", "c", "d"])]);
        let report = ngram_recall(&r, &s, 3).unwrap();
        assert_eq!(report.sensitive_ngrams, report.reference_ngrams);
        assert_eq!(report.sensitive_recall, Some(report.general_recall));
    }

    #[test]
    fn single_labeled_token_marks_every_covering_window() {
        // Only "c" is labeled; all three trigrams of "a b c d e" contain it.
        let r = corpus(vec![doc(
            "d",
            &["a", "b", "c", "d", "e"],
            &["O", "O", "B-N", "O", "O"],
        )]);
        let s = corpus(vec![unlabeled("d", &["b", "c", "d"])]);
        let report = sensitive_ngram_recall(&r, &s, 3).unwrap();
        assert_eq!(report.sensitive_ngrams, 3);
        assert_eq!(report.sensitive_recall, Some(1.0 / 3.0));
    }

    #[test]
    fn unlabeled_reference_yields_no_sensitive_ngrams() {
        let r = corpus(vec![unlabeled("d", &["a", "b", "c"])]);
        let s = corpus(vec![unlabeled("d", &["a", "b", "c"])]);
        let report = ngram_recall(&r, &s, 3).unwrap();
        assert_eq!(report.sensitive_recall, None);
        assert!(matches!(
            sensitive_ngram_recall(&r, &s, 3),
            Err(Error::NoSensitiveNgrams)
        ));
    }

    #[test]
    fn character_granularity_slides_over_joined_chars() {
        let r = corpus(vec![unlabeled("d", &["ab", "c"])]);
        // "ab c" -> windows of 3 chars: "ab ", "b c".
        let set = ngram_set(&r, 3, Granularity::Character).unwrap();
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn character_sensitive_windows_cover_labeled_token_chars() {
        let r = corpus(vec![doc("d", &["ab", "cd"], &["O", "B-N"])]);
        // "ab cd": bigram windows "ab", "b ", " c", "cd". The space belongs
        // to neither token, so only the windows touching 'c' or 'd' qualify.
        let report = ngram_recall_report(&r, &r, 2, Granularity::Character).unwrap();
        assert_eq!(report.sensitive_ngrams, 2);
    }
}
