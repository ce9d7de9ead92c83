//! CoNLL-style reader/writer: UTF-8 "token<TAB>label" lines, a
//! "-DOCSTART-<TAB>O" sentinel opens a document, blank lines separate
//! sentences, and a blank line pair also opens a new document.

use super::bio::{repair_bio, BioRepair};
use super::{Corpus, Document, Language};
use crate::error::Error;
use crate::Result;

const DOCSTART: &str = "-DOCSTART-";

/// A BIO repair applied during parsing, keyed by the assigned document id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConllWarning {
    pub doc_id: String,
    pub repair: BioRepair,
}

/// Parse result: the corpus plus any BIO repairs that were applied.
/// Invalid BIO transitions are repaired to "B-", never accepted silently.
#[derive(Debug, Clone)]
pub struct ConllParse {
    pub corpus: Corpus,
    pub warnings: Vec<ConllWarning>,
}

pub fn parse_conll(text: &str) -> Result<ConllParse> {
    let mut documents = Vec::new();
    let mut warnings = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut prev_blank = false;

    let mut flush = |tokens: &mut Vec<String>, labels: &mut Vec<String>| {
        if tokens.is_empty() {
            return;
        }
        let id = format!("doc-{:04}", documents.len());
        let mut doc_labels = std::mem::take(labels);
        for repair in repair_bio(&mut doc_labels) {
            warnings.push(ConllWarning {
                doc_id: id.clone(),
                repair,
            });
        }
        documents.push(Document {
            id,
            tokens: std::mem::take(tokens),
            labels: doc_labels,
            language: Language::Other,
        });
    };

    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if prev_blank {
                flush(&mut tokens, &mut labels);
            }
            prev_blank = true;
            continue;
        }
        prev_blank = false;
        let mut fields = line.split('\t');
        let (token, label) = match (fields.next(), fields.next(), fields.next()) {
            (Some(t), Some(l), None) => (t, l),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected \"token<TAB>label\", got {line:?}"),
                })
            }
        };
        if token == DOCSTART {
            flush(&mut tokens, &mut labels);
            continue;
        }
        tokens.push(token.to_string());
        labels.push(label.to_string());
    }
    flush(&mut tokens, &mut labels);

    Ok(ConllParse {
        corpus: Corpus::from_documents(documents)?,
        warnings,
    })
}

pub fn write_conll(corpus: &Corpus) -> String {
    let mut out = String::new();
    for doc in &corpus.documents {
        out.push_str(DOCSTART);
        out.push_str("\tO\n");
        for (token, label) in doc.tokens.iter().zip(&doc.labels) {
            out.push_str(token);
            out.push('\t');
            out.push_str(label);
            out.push('\n');
        }
    }
    out
}
