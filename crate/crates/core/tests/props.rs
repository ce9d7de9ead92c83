//! Property tests for structural invariants: chunking, format round trips,
//! distribution normalization, fold arithmetic, and stemmer idempotence.

use std::collections::BTreeSet;

use proptest::prelude::*;

use synthner_core::corpus::{
    chunk_document, parse_conll, read_jsonl, split_folds, subset_training, write_conll,
    write_jsonl, Corpus, Document, Language,
};
use synthner_core::generation::{apply_temperature, nucleus_filter, train_lm};
use synthner_core::metrics::{lexical_diversity, stem};

fn token_strategy() -> impl Strategy<Value = String> {
    "[a-zåäö]{1,8}"
}

fn label_strategy() -> impl Strategy<Value = Vec<String>> {
    // Valid BIO over two classes: entities are B- optionally followed by I-.
    prop::collection::vec((0..3u8, prop::bool::ANY), 1..40).prop_map(|steps| {
        let mut labels = Vec::new();
        let mut open: Option<&str> = None;
        for (kind, extend) in steps {
            match kind {
                0 => {
                    labels.push("O".to_string());
                    open = None;
                }
                _ => {
                    let class = if kind == 1 { "NAME" } else { "DATE" };
                    if open == Some(class) && extend {
                        labels.push(format!("I-{class}"));
                    } else {
                        labels.push(format!("B-{class}"));
                    }
                    open = Some(class);
                }
            }
        }
        labels
    })
}

fn document_strategy() -> impl Strategy<Value = Document> {
    label_strategy().prop_flat_map(|labels| {
        let len = labels.len();
        (
            prop::collection::vec(token_strategy(), len..=len),
            Just(labels),
        )
            .prop_map(|(tokens, labels)| {
                Document::new("doc", tokens, labels, Language::Sv).unwrap()
            })
    })
}

fn corpus_strategy(max_docs: usize) -> impl Strategy<Value = Corpus> {
    prop::collection::vec(document_strategy(), 1..=max_docs).prop_map(|mut docs| {
        for (i, doc) in docs.iter_mut().enumerate() {
            doc.id = format!("doc-{i:03}");
        }
        Corpus::from_documents(docs).unwrap()
    })
}

proptest! {
    #[test]
    fn chunk_flattening_reproduces_the_document(
        doc in document_strategy(),
        max_words in prop::sample::select(vec![1usize, 2, 128, 1_000_000]),
    ) {
        let chunks = chunk_document(&doc, max_words);
        let tokens: Vec<String> = chunks.iter().flat_map(|(t, _)| t.iter().cloned()).collect();
        let labels: Vec<String> = chunks.iter().flat_map(|(_, l)| l.iter().cloned()).collect();
        prop_assert_eq!(tokens, doc.tokens.clone());
        prop_assert_eq!(labels, doc.labels.clone());
        for (t, _) in &chunks[..chunks.len().saturating_sub(1)] {
            prop_assert_eq!(t.len(), max_words);
        }
    }

    #[test]
    fn jsonl_round_trip_is_identity(corpus in corpus_strategy(5)) {
        let round = read_jsonl(&write_jsonl(&corpus)).unwrap();
        prop_assert_eq!(round, corpus);
    }

    #[test]
    fn conll_round_trip_preserves_tokens_and_labels(corpus in corpus_strategy(4)) {
        // Ids are assigned by the parser, so the law is on content and on
        // write-parse-write stability.
        let text = write_conll(&corpus);
        let parsed = parse_conll(&text).unwrap();
        prop_assert!(parsed.warnings.is_empty());
        prop_assert_eq!(parsed.corpus.len(), corpus.len());
        for (a, b) in corpus.documents.iter().zip(&parsed.corpus.documents) {
            prop_assert_eq!(&a.tokens, &b.tokens);
            prop_assert_eq!(&a.labels, &b.labels);
        }
        prop_assert_eq!(write_conll(&parsed.corpus), text);
    }

    #[test]
    fn lm_distributions_are_normalized(
        corpus in corpus_strategy(3),
        context in prop::collection::vec(token_strategy(), 0..3),
    ) {
        let lm = train_lm(&corpus, 3, 0.1).unwrap();
        let ctx: Vec<&str> = context.iter().map(String::as_str).collect();
        let dist = lm.next_token_distribution(&ctx);
        let sum: f64 = dist.values().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9, "sum {}", sum);
        prop_assert!(dist.values().all(|&p| p >= 0.0));

        let shaped = apply_temperature(&dist, 0.7).unwrap();
        let shaped_sum: f64 = shaped.values().sum();
        prop_assert!((shaped_sum - 1.0).abs() < 1e-9);

        let filtered = nucleus_filter(&dist, 0.9);
        let filtered_sum: f64 = filtered.values().sum();
        prop_assert!((filtered_sum - 1.0).abs() < 1e-9);
        prop_assert!(filtered.keys().all(|w| dist.contains_key(w)));
    }

    #[test]
    fn training_subsets_nest_for_any_fraction_pair(
        seed in 0u64..1000,
        small in 0.0f64..0.5,
        extra in 0.0f64..0.45,
    ) {
        let docs = (0..40)
            .map(|i| Document::unlabeled(format!("d{i}"), vec![format!("w{i}")], Language::Other))
            .collect();
        let corpus = Corpus::from_documents(docs).unwrap();
        let plan = split_folds(&corpus, 5, 0.05, seed).unwrap();
        let fold = &plan.folds[0];
        let large = small + extra;
        let small_subset = subset_training(&corpus, fold, small).unwrap();
        let large_subset = subset_training(&corpus, fold, large).unwrap();
        let large_ids: BTreeSet<&String> = large_subset.documents.iter().map(|d| &d.id).collect();
        prop_assert!(small_subset.documents.iter().all(|d| large_ids.contains(&d.id)));
    }

    #[test]
    fn stemming_is_idempotent_and_diversity_bounded(corpus in corpus_strategy(3)) {
        for doc in &corpus.documents {
            for token in &doc.tokens {
                let once = stem(token, doc.language);
                prop_assert_eq!(stem(&once, doc.language), once.clone());
            }
        }
        if corpus.total_tokens() > 0 {
            let report = lexical_diversity(&corpus, Language::Sv).unwrap();
            prop_assert!(report.lexical_diversity > 0.0 && report.lexical_diversity <= 1.0);
        }
    }
}
