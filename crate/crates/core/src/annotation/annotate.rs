//! Machine annotation of corpora with chunked decoding.

use rayon::prelude::*;

use super::perceptron::{decode, TaggerModel};
use crate::corpus::{chunk_document, repair_bio, Corpus, Document};
use crate::Result;

/// Labels every document with the tagger. Documents are split into
/// `chunk_words` windows (from the tagger's training metadata), decoded per
/// chunk, and re-concatenated; token sequences are preserved exactly. Chunk
/// seams are repaired, never merged across chunks.
pub fn annotate_corpus(tagger: &TaggerModel, corpus: &Corpus) -> Result<Corpus> {
    let chunk_words = tagger.meta.chunk_words.max(1);
    let documents: Vec<Document> = corpus
        .documents
        .par_iter()
        .map(|doc| {
            let mut labels = Vec::with_capacity(doc.len());
            for (tokens, _) in chunk_document(doc, chunk_words) {
                labels.extend(decode(tagger, tokens));
            }
            repair_bio(&mut labels);
            Document {
                id: doc.id.clone(),
                tokens: doc.tokens.clone(),
                labels,
                language: doc.language,
            }
        })
        .collect();
    Corpus::from_documents(documents)
}
