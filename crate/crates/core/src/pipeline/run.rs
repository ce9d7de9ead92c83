//! Fold execution and cross-fold aggregation.
//!
//! One fold runs the whole loop: train the gold tagger on an ma-fraction
//! subset, adapt the generator on a da-fraction subset, synthesize from
//! validation prompts, machine-annotate, train a second tagger on the
//! synthetic corpus, and evaluate both taggers on the held-out test set,
//! plus diversity and n-gram-recall metrics.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::annotation::{annotate_corpus, train_tagger, TaggerModel, TrainingMeta};
use crate::corpus::{
    extract_prompts, split_folds, subset_training, Corpus, Document, Fold, FoldPlan, Language,
    Prompt,
};
use crate::error::Error;
use crate::generation::{
    base_vocabulary, resolve_max_tokens, synthesize_corpus, train_lm, GenerationConfig, NGramLM,
    RemoteTrainingConfig,
};
use crate::metrics::{
    lexical_diversity, ngram_recall_report, token_f1, DiversityReport, F1Report, Granularity,
    NGramRecallReport,
};
use crate::remote::{annotate_remote, generate_remote, train_remote};
use crate::seed::derive_seed;
use crate::Result;

use super::config::{AnnotatorConfig, ExperimentConfig, GeneratorConfig};

/// Per-fold provenance: every derived quantity needed to audit or replay the
/// fold. Deliberately contains no wall-clock values so that reruns are
/// byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldManifest {
    pub fold: usize,
    pub seed: u64,
    pub generation_seed: u64,
    pub gold_tagger_seed: u64,
    pub synthetic_tagger_seed: u64,
    pub prompt_words: usize,
    pub prompt_count: usize,
    pub samples_per_prompt: usize,
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub chunk_words: usize,
    pub epochs: usize,
    pub test_docs: usize,
    pub validation_docs: usize,
    pub train_pool_docs: usize,
    pub ma_train_docs: usize,
    pub da_train_docs: usize,
    pub synthetic_docs: usize,
    /// Gold tagger training ids are disjoint from test and validation ids.
    pub train_test_disjoint: bool,
    /// SHA-256 digests of the fold's main artifacts (JSONL / JSON bytes).
    pub digests: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldDiversity {
    pub gold: DiversityReport,
    pub synthetic: DiversityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub gold_f1: F1Report,
    pub synthetic_f1: F1Report,
    /// gold micro-F1 minus synthetic micro-F1.
    pub delta: f64,
    pub diversity: FoldDiversity,
    /// One report per configured n, in `n_values` order.
    pub privacy: Vec<NGramRecallReport>,
    pub manifest: FoldManifest,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

fn corpus_language(corpus: &Corpus) -> Language {
    corpus
        .documents
        .first()
        .map(|d| d.language)
        .unwrap_or(Language::Other)
}

enum Generator {
    Native(NGramLM),
    Remote {
        endpoint: String,
        training: RemoteTrainingConfig,
    },
}

/// Trains or adapts the generator on `da_corpus`. An empty da corpus means no
/// adaptation: the native path falls back to an untrained model over a
/// generic vocabulary, the stand-in for a base model that never saw in-domain
/// text.
fn prepare_generator(config: &ExperimentConfig, da_corpus: &Corpus) -> Result<Generator> {
    match &config.generator {
        GeneratorConfig::Native { order, discount } => {
            let lm = if da_corpus.is_empty() {
                NGramLM::untrained(*order, *discount, &base_vocabulary())?
            } else {
                train_lm(da_corpus, *order, *discount)?
            };
            Ok(Generator::Native(lm))
        }
        GeneratorConfig::Remote { endpoint, training } => {
            if !da_corpus.is_empty() {
                crate::remote::adapt_remote(endpoint, da_corpus, training)?;
            }
            Ok(Generator::Remote {
                endpoint: endpoint.clone(),
                training: training.clone(),
            })
        }
    }
}

fn synthesize(
    generator: &Generator,
    prompts: &[Prompt],
    cfg: &GenerationConfig,
    language: Language,
    seed: u64,
) -> Result<Corpus> {
    match generator {
        Generator::Native(lm) => synthesize_corpus(lm, prompts, cfg, language, seed),
        Generator::Remote { endpoint, training } => {
            generate_remote(endpoint, prompts, cfg, training, language)
        }
    }
}

enum Annotator {
    Native(TaggerModel),
    Remote { endpoint: String },
}

fn train_annotator(config: &ExperimentConfig, corpus: &Corpus, seed: u64) -> Result<Annotator> {
    match &config.annotator {
        AnnotatorConfig::Native { epochs, chunk_words } => Ok(Annotator::Native(train_tagger(
            corpus,
            *epochs,
            *chunk_words,
            seed,
        )?)),
        AnnotatorConfig::Remote { endpoint, training } => {
            train_remote(endpoint, corpus, training)?;
            Ok(Annotator::Remote {
                endpoint: endpoint.clone(),
            })
        }
    }
}

/// Trains the downstream tagger on a machine-annotated corpus. A corpus in
/// which the annotator found no entities at all cannot train anything; it
/// yields a zero model that tags everything "O" (the honest degenerate
/// outcome for an unadapted generator).
fn train_synthetic_tagger(
    config: &ExperimentConfig,
    corpus: &Corpus,
    seed: u64,
) -> Result<Annotator> {
    let degenerate = corpus.label_set.is_empty();
    match &config.annotator {
        AnnotatorConfig::Native { epochs, chunk_words } if degenerate => {
            Ok(Annotator::Native(TaggerModel::from_weight_entries(
                &[],
                &[],
                TrainingMeta {
                    epochs: *epochs,
                    chunk_words: *chunk_words,
                    seed,
                },
            )?))
        }
        _ => train_annotator(config, corpus, seed),
    }
}

fn annotate(annotator: &Annotator, corpus: &Corpus) -> Result<Corpus> {
    match annotator {
        Annotator::Native(tagger) => annotate_corpus(tagger, corpus),
        Annotator::Remote { endpoint } => annotate_remote(endpoint, corpus),
    }
}

fn strip_labels(corpus: &Corpus) -> Corpus {
    let documents = corpus
        .documents
        .iter()
        .map(|d| Document::unlabeled(d.id.clone(), d.tokens.clone(), d.language))
        .collect();
    Corpus::from_documents(documents).expect("ids already unique")
}

fn evaluate(annotator: &Annotator, test: &Corpus) -> Result<F1Report> {
    let predicted = annotate(annotator, &strip_labels(test))?;
    token_f1(test, &predicted)
}

/// samples_per_prompt that makes prompts x samples ≈ multiplier x non-test
/// size. Multipliers below 1 synthesize at 4x first and subsample, mirroring
/// the "5% of the synthetic corpora" setup, so the small corpus is a subset
/// of the large one.
fn derive_samples_per_prompt(multiplier: f64, non_test: usize, prompts: usize) -> usize {
    let effective = if multiplier < 1.0 { 4.0 } else { multiplier };
    (((effective * non_test as f64) / prompts as f64).round() as usize).max(1)
}

/// Deterministically keeps `keep` documents of the synthetic corpus.
fn subsample_corpus(corpus: &Corpus, keep: usize, seed: u64) -> Result<Corpus> {
    if keep >= corpus.len() {
        return Ok(corpus.clone());
    }
    let mut indices: Vec<usize> = (0..corpus.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    indices.truncate(keep.max(1));
    indices.sort_unstable();
    let documents = indices
        .into_iter()
        .map(|i| corpus.documents[i].clone())
        .collect();
    Corpus::from_documents(documents)
}

fn chunk_and_epoch_settings(config: &ExperimentConfig) -> (usize, usize) {
    match &config.annotator {
        AnnotatorConfig::Native { epochs, chunk_words } => (*epochs, *chunk_words),
        AnnotatorConfig::Remote { training, .. } => (training.epochs as usize, 128),
    }
}

/// Runs the eight pipeline stages for one fold. Errors carry the failing
/// stage name.
pub fn run_fold(
    config: &ExperimentConfig,
    corpus: &Corpus,
    fold: &Fold,
    fold_index: usize,
) -> Result<FoldResult> {
    config.validate()?;
    let fold_seed = derive_seed(config.seed, &[fold_index as u64]);
    let gold_tagger_seed = derive_seed(fold_seed, &[1]);
    let generation_seed = derive_seed(fold_seed, &[2]);
    let synthetic_tagger_seed = derive_seed(fold_seed, &[3]);
    let subsample_seed = derive_seed(fold_seed, &[4]);

    let test = corpus.select(&fold.test_ids).map_err(|e| e.at_stage("select-test"))?;
    let validation = corpus
        .select(&fold.validation_ids)
        .map_err(|e| e.at_stage("select-validation"))?;
    let non_test = fold.train_pool_ids.len() + fold.validation_ids.len();

    // (1) gold tagger on the ma-fraction subset.
    let ma_corpus = subset_training(corpus, fold, config.ma_fraction)
        .map_err(|e| e.at_stage("subset-ma"))?;
    let gold_tagger = train_annotator(config, &ma_corpus, gold_tagger_seed)
        .map_err(|e| e.at_stage("train-gold-tagger"))?;

    // (2) generator on the da-fraction subset.
    let da_corpus = subset_training(corpus, fold, config.da_fraction)
        .map_err(|e| e.at_stage("subset-da"))?;
    let generator =
        prepare_generator(config, &da_corpus).map_err(|e| e.at_stage("adapt-generator"))?;

    // (3) prompts from the validation slice.
    let prompts = extract_prompts(&validation, config.prompt_words);
    if prompts.is_empty() {
        return Err(Error::validation("validation slice yielded no prompts")
            .at_stage("extract-prompts"));
    }

    // (4) synthesis sized by the multiplier.
    let samples_per_prompt =
        derive_samples_per_prompt(config.synth_multiplier, non_test, prompts.len());
    let mut gen_cfg = config.generation.clone();
    gen_cfg.samples_per_prompt = samples_per_prompt;
    gen_cfg.max_tokens = resolve_max_tokens(&validation)
        .map_err(|e| e.at_stage("synthesize"))?
        .max(gen_cfg.min_tokens);
    let language = corpus_language(&validation);
    let mut synthetic_raw = synthesize(&generator, &prompts, &gen_cfg, language, generation_seed)
        .map_err(|e| e.at_stage("synthesize"))?;
    if config.synth_multiplier < 1.0 {
        let keep = ((config.synth_multiplier * non_test as f64).round() as usize).max(1);
        synthetic_raw = subsample_corpus(&synthetic_raw, keep, subsample_seed)
            .map_err(|e| e.at_stage("synthesize"))?;
    }

    // (5) machine annotation.
    let synthetic = annotate(&gold_tagger, &synthetic_raw).map_err(|e| e.at_stage("annotate"))?;

    // (6) downstream tagger on the synthetic corpus, same hyperparameters.
    let synthetic_tagger = train_synthetic_tagger(config, &synthetic, synthetic_tagger_seed)
        .map_err(|e| e.at_stage("train-synthetic-tagger"))?;

    // (7) both taggers against the held-out test set.
    let gold_f1 = evaluate(&gold_tagger, &test).map_err(|e| e.at_stage("evaluate-gold"))?;
    let synthetic_f1 =
        evaluate(&synthetic_tagger, &test).map_err(|e| e.at_stage("evaluate-synthetic"))?;

    // (8) diversity and privacy. The privacy reference is the generator's
    // training corpus; with no adaptation there is no retention risk from
    // gold text, so the largest training subset stands in as reference.
    let metric_language = config.metrics.language.unwrap_or(language);
    let gold_diversity = lexical_diversity(&ma_corpus, metric_language)
        .map_err(|e| e.at_stage("diversity"))?;
    let synthetic_diversity =
        lexical_diversity(&synthetic, metric_language).map_err(|e| e.at_stage("diversity"))?;
    let reference = if da_corpus.is_empty() {
        subset_training(corpus, fold, 0.95).map_err(|e| e.at_stage("privacy"))?
    } else {
        da_corpus.clone()
    };
    let mut privacy = Vec::with_capacity(config.metrics.n_values.len());
    for &n in &config.metrics.n_values {
        privacy.push(
            ngram_recall_report(&reference, &synthetic, n, Granularity::Word)
                .map_err(|e| e.at_stage("privacy"))?,
        );
    }

    let mut digests = BTreeMap::new();
    digests.insert(
        "synthetic_corpus".to_string(),
        sha256_hex(crate::corpus::write_jsonl(&synthetic).as_bytes()),
    );
    digests.insert(
        "ma_corpus".to_string(),
        sha256_hex(crate::corpus::write_jsonl(&ma_corpus).as_bytes()),
    );
    digests.insert(
        "da_corpus".to_string(),
        sha256_hex(crate::corpus::write_jsonl(&da_corpus).as_bytes()),
    );
    if let Annotator::Native(tagger) = &gold_tagger {
        digests.insert(
            "gold_tagger".to_string(),
            sha256_hex(serde_json::to_vec(tagger)?.as_slice()),
        );
    }
    if let Annotator::Native(tagger) = &synthetic_tagger {
        digests.insert(
            "synthetic_tagger".to_string(),
            sha256_hex(serde_json::to_vec(tagger)?.as_slice()),
        );
    }

    let ma_ids: std::collections::BTreeSet<&String> =
        ma_corpus.documents.iter().map(|d| &d.id).collect();
    let train_test_disjoint = !fold
        .test_ids
        .iter()
        .chain(&fold.validation_ids)
        .any(|id| ma_ids.contains(id));

    let (epochs, chunk_words) = chunk_and_epoch_settings(config);
    let manifest = FoldManifest {
        fold: fold_index,
        seed: fold_seed,
        generation_seed,
        gold_tagger_seed,
        synthetic_tagger_seed,
        prompt_words: config.prompt_words,
        prompt_count: prompts.len(),
        samples_per_prompt,
        min_tokens: gen_cfg.min_tokens,
        max_tokens: gen_cfg.max_tokens,
        chunk_words,
        epochs,
        test_docs: test.len(),
        validation_docs: validation.len(),
        train_pool_docs: fold.train_pool_ids.len(),
        ma_train_docs: ma_corpus.len(),
        da_train_docs: da_corpus.len(),
        synthetic_docs: synthetic.len(),
        train_test_disjoint,
        digests,
    };

    Ok(FoldResult {
        fold: fold_index,
        delta: gold_f1.micro_f1 - synthetic_f1.micro_f1,
        gold_f1,
        synthetic_f1,
        diversity: FoldDiversity {
            gold: gold_diversity,
            synthetic: synthetic_diversity,
        },
        privacy,
        manifest,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

pub fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    MeanStd {
        mean,
        std: var.sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub fold_plan: FoldPlan,
    pub folds: Vec<FoldResult>,
    /// (fold index, stage-tagged error message) for folds that failed.
    pub failures: Vec<(usize, String)>,
    /// `None` when any fold failed: means over incomplete folds are refused.
    pub aggregates: Option<BTreeMap<String, MeanStd>>,
}

impl RunResult {
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }
}

/// Mean ± population std of every scalar metric across folds.
pub fn aggregate(folds: &[FoldResult]) -> BTreeMap<String, MeanStd> {
    let mut out = BTreeMap::new();
    let collect = |f: &dyn Fn(&FoldResult) -> f64| -> Vec<f64> { folds.iter().map(f).collect() };
    out.insert("gold_f1".into(), mean_std(&collect(&|r| r.gold_f1.micro_f1)));
    out.insert(
        "synthetic_f1".into(),
        mean_std(&collect(&|r| r.synthetic_f1.micro_f1)),
    );
    out.insert("delta".into(), mean_std(&collect(&|r| r.delta)));
    out.insert(
        "gold_diversity".into(),
        mean_std(&collect(&|r| r.diversity.gold.lexical_diversity)),
    );
    out.insert(
        "synthetic_diversity".into(),
        mean_std(&collect(&|r| r.diversity.synthetic.lexical_diversity)),
    );
    out.insert(
        "gold_doc_length".into(),
        mean_std(&collect(&|r| r.diversity.gold.mean_doc_length)),
    );
    out.insert(
        "synthetic_doc_length".into(),
        mean_std(&collect(&|r| r.diversity.synthetic.mean_doc_length)),
    );
    if let Some(first) = folds.first() {
        for (i, report) in first.privacy.iter().enumerate() {
            let n = report.n;
            out.insert(
                format!("general_recall_n{n}"),
                mean_std(&collect(&|r| r.privacy[i].general_recall)),
            );
            if folds.iter().all(|r| r.privacy[i].sensitive_recall.is_some()) {
                out.insert(
                    format!("sensitive_recall_n{n}"),
                    mean_std(&collect(&|r| r.privacy[i].sensitive_recall.unwrap())),
                );
            }
        }
    }
    out
}

/// Splits, runs every fold (in parallel), and aggregates. A failed fold does
/// not abort its siblings; it is recorded and suppresses the aggregates.
pub fn run_experiment(config: &ExperimentConfig, corpus: &Corpus) -> Result<RunResult> {
    config.validate()?;
    let plan = split_folds(corpus, config.folds, config.val_fraction, config.seed)?;
    let outcomes: Vec<(usize, Result<FoldResult>)> = plan
        .folds
        .par_iter()
        .enumerate()
        .map(|(i, fold)| (i, run_fold(config, corpus, fold, i)))
        .collect();

    let mut folds = Vec::new();
    let mut failures = Vec::new();
    for (i, outcome) in outcomes {
        match outcome {
            Ok(result) => folds.push(result),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    folds.sort_by_key(|r| r.fold);
    let aggregates = if failures.is_empty() {
        Some(aggregate(&folds))
    } else {
        None
    };
    Ok(RunResult {
        config: config.clone(),
        fold_plan: plan,
        folds,
        failures,
        aggregates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_per_prompt_is_eighty_at_the_reference_settings() {
        // 5% validation of a 2,000-doc corpus: non-test 1,600, 80 prompts.
        assert_eq!(derive_samples_per_prompt(4.0, 1600, 80), 80);
    }

    #[test]
    fn small_multipliers_synthesize_at_four_x() {
        assert_eq!(
            derive_samples_per_prompt(0.05, 1600, 80),
            derive_samples_per_prompt(4.0, 1600, 80)
        );
    }

    #[test]
    fn mean_std_arithmetic() {
        let ms = mean_std(&[10.0, 20.0]);
        assert_eq!(ms.mean, 15.0);
        assert_eq!(ms.std, 5.0);
        let constant = mean_std(&[3.0, 3.0, 3.0]);
        assert_eq!(constant.std, 0.0);
    }

    #[test]
    fn subsample_is_deterministic_and_sized() {
        let docs = (0..50)
            .map(|i| {
                Document::unlabeled(format!("d{i}"), vec![format!("w{i}")], Language::Other)
            })
            .collect();
        let corpus = Corpus::from_documents(docs).unwrap();
        let a = subsample_corpus(&corpus, 10, 3).unwrap();
        let b = subsample_corpus(&corpus, 10, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert_ne!(a, subsample_corpus(&corpus, 10, 4).unwrap());
    }
}
