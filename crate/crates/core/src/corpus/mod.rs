//! Corpus data model: BIO-labeled documents, fold splitting, prompts,
//! chunking, and file formats.

mod bio;
mod conll;
mod folds;
mod jsonl;
mod template;

pub use bio::{label_class, repair_bio, validate_bio, BioRepair, LabelKind};
pub use conll::{parse_conll, write_conll, ConllParse, ConllWarning};
pub use folds::{split_folds, subset_training, Fold, FoldPlan};
pub use jsonl::{read_jsonl, write_jsonl};
pub use template::{make_template_corpus, TemplateSpec};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Language tag carried by every document; selects the stemmer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Sv,
    Es,
    #[default]
    Other,
}

impl std::fmt::Display for Language {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Language::Sv => "sv",
            Language::Es => "es",
            Language::Other => "other",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sv" => Ok(Language::Sv),
            "es" => Ok(Language::Es),
            "other" => Ok(Language::Other),
            other => Err(Error::validation(format!("unknown language: {other}"))),
        }
    }
}

/// A tokenized text with one BIO label per token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<String>,
    pub labels: Vec<String>,
    #[serde(default)]
    pub language: Language,
}

impl Document {
    /// Builds a document, checking the length invariant and BIO validity.
    pub fn new(
        id: impl Into<String>,
        tokens: Vec<String>,
        labels: Vec<String>,
        language: Language,
    ) -> Result<Self> {
        let id = id.into();
        if tokens.len() != labels.len() {
            return Err(Error::Document {
                id,
                message: format!("{} tokens but {} labels", tokens.len(), labels.len()),
            });
        }
        validate_bio(&labels).map_err(|message| Error::Document {
            id: id.clone(),
            message,
        })?;
        Ok(Document {
            id,
            tokens,
            labels,
            language,
        })
    }

    /// All-"O" document, used for freshly generated text.
    pub fn unlabeled(id: impl Into<String>, tokens: Vec<String>, language: Language) -> Self {
        let labels = vec!["O".to_string(); tokens.len()];
        Document {
            id: id.into(),
            tokens,
            labels,
            language,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Count of tokens carrying a non-"O" label.
    pub fn labeled_token_count(&self) -> usize {
        self.labels.iter().filter(|l| *l != "O").count()
    }
}

/// Ordered collection of documents with the entity-class inventory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub label_set: BTreeSet<String>,
}

impl Corpus {
    /// Builds a corpus; the label set is inferred from the documents.
    pub fn from_documents(documents: Vec<Document>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for doc in &documents {
            if !seen.insert(doc.id.clone()) {
                return Err(Error::validation(format!("duplicate document id: {}", doc.id)));
            }
        }
        let label_set = infer_label_set(&documents);
        Ok(Corpus {
            documents,
            label_set,
        })
    }

    pub fn empty() -> Self {
        Corpus {
            documents: Vec::new(),
            label_set: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn total_tokens(&self) -> usize {
        self.documents.iter().map(|d| d.len()).sum()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    /// Sub-corpus of the given ids, in the order of `ids`.
    pub fn select(&self, ids: &[String]) -> Result<Corpus> {
        let mut documents = Vec::with_capacity(ids.len());
        for id in ids {
            let doc = self
                .get(id)
                .ok_or_else(|| Error::validation(format!("unknown document id: {id}")))?;
            documents.push(doc.clone());
        }
        Corpus::from_documents(documents)
    }
}

/// Entity classes appearing in any label, with the B-/I- prefix stripped.
pub fn infer_label_set(documents: &[Document]) -> BTreeSet<String> {
    let mut set = BTreeSet::new();
    for doc in documents {
        for label in &doc.labels {
            if let Some(class) = label.strip_prefix("B-").or_else(|| label.strip_prefix("I-")) {
                set.insert(class.to_string());
            }
        }
    }
    set
}

/// Leading words of a document, used as a generation starting point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub source_doc_id: String,
    pub words: Vec<String>,
}

/// One prompt per document, in corpus order. Words are whitespace-delimited
/// words of the detokenized document; a shorter document yields a shorter
/// prompt.
pub fn extract_prompts(corpus: &Corpus, n_words: usize) -> Vec<Prompt> {
    assert!(n_words >= 1, "n_words must be >= 1");
    corpus
        .documents
        .iter()
        .map(|doc| {
            let text = doc.tokens.join(" ");
            let words: Vec<String> = text
                .split_whitespace()
                .take(n_words)
                .map(str::to_string)
                .collect();
            Prompt {
                source_doc_id: doc.id.clone(),
                words,
            }
        })
        .collect()
}

/// Splits a document into consecutive windows of at most `max_words` tokens.
/// All chunks except possibly the last are exactly `max_words` long, and the
/// concatenation of the chunks reproduces the document.
pub fn chunk_document<'a>(
    doc: &'a Document,
    max_words: usize,
) -> Vec<(&'a [String], &'a [String])> {
    assert!(max_words >= 1, "max_words must be >= 1");
    doc.tokens
        .chunks(max_words)
        .zip(doc.labels.chunks(max_words))
        .collect()
}

/// Per-document length and label-count statistics (population std).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocStats {
    pub mean_length: f64,
    pub std_length: f64,
    pub mean_labels_per_doc: f64,
    pub std_labels_per_doc: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, tokens: &[&str], labels: &[&str]) -> Document {
        Document::new(
            id,
            tokens.iter().map(|s| s.to_string()).collect(),
            labels.iter().map(|s| s.to_string()).collect(),
            Language::Sv,
        )
        .unwrap()
    }

    #[test]
    fn document_rejects_length_mismatch() {
        let err = Document::new(
            "d1",
            vec!["a".into(), "b".into(), "c".into()],
            vec!["O".into(), "O".into()],
            Language::Sv,
        )
        .unwrap_err();
        assert!(err.to_string().contains("d1"));
    }

    #[test]
    fn corpus_rejects_duplicate_ids() {
        let d1 = doc("x", &["a"], &["O"]);
        let d2 = doc("x", &["b"], &["O"]);
        assert!(Corpus::from_documents(vec![d1, d2]).is_err());
    }

    #[test]
    fn label_set_inferred_from_data() {
        let d = doc("x", &["Ana", "1999"], &["B-NAME", "B-DATE"]);
        let c = Corpus::from_documents(vec![d]).unwrap();
        let classes: Vec<_> = c.label_set.iter().cloned().collect();
        assert_eq!(classes, vec!["DATE".to_string(), "NAME".to_string()]);
    }

    #[test]
    fn prompts_take_first_three_words() {
        let d = doc(
            "x",
            &["Pat", "vårdas", "för", "feber"],
            &["O", "O", "O", "O"],
        );
        let c = Corpus::from_documents(vec![d]).unwrap();
        let prompts = extract_prompts(&c, 3);
        assert_eq!(prompts.len(), 1);
        assert_eq!(prompts[0].words, vec!["Pat", "vårdas", "för"]);
        assert_eq!(prompts[0].source_doc_id, "x");
    }

    #[test]
    fn short_document_yields_short_prompt() {
        let d = doc("x", &["Hej", "du"], &["O", "O"]);
        let c = Corpus::from_documents(vec![d]).unwrap();
        let prompts = extract_prompts(&c, 3);
        assert_eq!(prompts[0].words.len(), 2);
    }

    #[test]
    fn prompt_count_matches_corpus_order() {
        let docs: Vec<Document> = (0..20)
            .map(|i| doc(&format!("d{i}"), &["a", "b", "c"], &["O", "O", "O"]))
            .collect();
        let c = Corpus::from_documents(docs).unwrap();
        let prompts = extract_prompts(&c, 3);
        assert_eq!(prompts.len(), 20);
        assert_eq!(prompts[7].source_doc_id, "d7");
    }

    #[test]
    fn chunking_sizes() {
        let tokens: Vec<String> = (0..300).map(|i| format!("t{i}")).collect();
        let labels = vec!["O".to_string(); 300];
        let d = Document::new("x", tokens, labels, Language::Sv).unwrap();
        let chunks = chunk_document(&d, 128);
        let sizes: Vec<usize> = chunks.iter().map(|(t, _)| t.len()).collect();
        assert_eq!(sizes, vec![128, 128, 44]);
        let flat: Vec<&String> = chunks.iter().flat_map(|(t, _)| t.iter()).collect();
        assert_eq!(flat.len(), 300);
        assert!(flat.iter().zip(&d.tokens).all(|(a, b)| *a == b));
    }

    #[test]
    fn chunking_exact_fit_and_empty() {
        let tokens: Vec<String> = (0..128).map(|i| format!("t{i}")).collect();
        let labels = vec!["O".to_string(); 128];
        let d = Document::new("x", tokens, labels, Language::Sv).unwrap();
        assert_eq!(chunk_document(&d, 128).len(), 1);

        let empty = Document::new("y", vec![], vec![], Language::Sv).unwrap();
        assert!(chunk_document(&empty, 128).is_empty());
    }
}
