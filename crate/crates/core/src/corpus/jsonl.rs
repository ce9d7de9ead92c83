//! JSONL corpus format: one object per line with fields
//! `id`, `tokens`, `labels`, `language`.

use serde::{Deserialize, Serialize};

use super::{Corpus, Document, Language};
use crate::error::Error;
use crate::Result;

#[derive(Serialize, Deserialize)]
struct Record {
    id: String,
    tokens: Vec<String>,
    labels: Vec<String>,
    language: Language,
}

pub fn read_jsonl(text: &str) -> Result<Corpus> {
    let mut documents = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        if record.tokens.len() != record.labels.len() {
            return Err(Error::Document {
                id: record.id,
                message: format!(
                    "{} tokens but {} labels",
                    record.tokens.len(),
                    record.labels.len()
                ),
            });
        }
        documents.push(Document::new(
            record.id,
            record.tokens,
            record.labels,
            record.language,
        )?);
    }
    Corpus::from_documents(documents)
}

pub fn write_jsonl(corpus: &Corpus) -> String {
    let mut out = String::new();
    for doc in &corpus.documents {
        let record = Record {
            id: doc.id.clone(),
            tokens: doc.tokens.clone(),
            labels: doc.labels.clone(),
            language: doc.language,
        };
        out.push_str(&serde_json::to_string(&record).expect("record serializes"));
        out.push('\n');
    }
    out
}
