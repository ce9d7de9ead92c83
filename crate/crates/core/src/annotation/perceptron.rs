//! Averaged-perceptron BIO tagger with constrained greedy decoding.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::featurize;
use super::FEATURE_TEMPLATE_VERSION;
use crate::corpus::{chunk_document, Corpus};
use crate::error::Error;
use crate::Result;

/// Constant prior for "O", so an untrained (all-zero) model tags everything
/// outside instead of falling back to the lexicographically first label.
const O_BIAS: f64 = 1e-3;

const START_FEATURE: &str = "pl=<start>";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub epochs: usize,
    pub chunk_words: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum LabelForm {
    Outside,
    Begin(String),
    Inside(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "PortableTagger", try_from = "PortableTagger")]
pub struct TaggerModel {
    /// Sorted BIO label inventory, closed under B-/I- pairing, plus "O".
    labels: Vec<String>,
    forms: Vec<LabelForm>,
    feature_index: HashMap<String, u32>,
    /// Flattened [feature x label] weight matrix.
    weights: Vec<f64>,
    pub feature_template_version: String,
    pub meta: TrainingMeta,
}

impl TaggerModel {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Builds a model from explicit (feature, label, weight) entries. Mainly
    /// for fixtures and tests; `train_tagger` is the normal path.
    pub fn from_weight_entries(
        classes: &[&str],
        entries: &[(&str, &str, f64)],
        meta: TrainingMeta,
    ) -> Result<Self> {
        let labels = label_inventory(classes);
        let forms = parse_forms(&labels)?;
        let mut feature_index = HashMap::new();
        for (feature, _, _) in entries {
            let next = feature_index.len() as u32;
            feature_index.entry(feature.to_string()).or_insert(next);
        }
        let mut weights = vec![0.0; feature_index.len() * labels.len()];
        for (feature, label, w) in entries {
            let f = feature_index[*feature] as usize;
            let l = labels
                .iter()
                .position(|x| x == label)
                .ok_or_else(|| Error::validation(format!("unknown label {label}")))?;
            weights[f * labels.len() + l] = *w;
        }
        Ok(TaggerModel {
            labels,
            forms,
            feature_index,
            weights,
            feature_template_version: FEATURE_TEMPLATE_VERSION.to_string(),
            meta,
        })
    }

    fn feature_id(&self, feature: &str) -> Option<u32> {
        self.feature_index.get(feature).copied()
    }

    /// Greedy constrained argmax for one position. `prev` is the previously
    /// predicted label index, if any.
    fn predict(&self, feature_ids: &[u32], prev: Option<usize>) -> usize {
        predict_step(
            &self.weights,
            &self.forms,
            self.labels.len(),
            feature_ids,
            prev,
        )
    }
}

fn label_inventory(classes: &[&str]) -> Vec<String> {
    let mut labels = vec!["O".to_string()];
    for class in classes {
        labels.push(format!("B-{class}"));
        labels.push(format!("I-{class}"));
    }
    labels.sort();
    labels
}

fn parse_forms(labels: &[String]) -> Result<Vec<LabelForm>> {
    labels
        .iter()
        .map(|l| {
            if l == "O" {
                Ok(LabelForm::Outside)
            } else if let Some(c) = l.strip_prefix("B-") {
                Ok(LabelForm::Begin(c.to_string()))
            } else if let Some(c) = l.strip_prefix("I-") {
                Ok(LabelForm::Inside(c.to_string()))
            } else {
                Err(Error::validation(format!("malformed label {l}")))
            }
        })
        .collect()
}

fn allowed(form: &LabelForm, prev_class: Option<&str>) -> bool {
    match form {
        LabelForm::Outside | LabelForm::Begin(_) => true,
        LabelForm::Inside(class) => prev_class == Some(class.as_str()),
    }
}

fn form_class(form: &LabelForm) -> Option<&str> {
    match form {
        LabelForm::Outside => None,
        LabelForm::Begin(c) | LabelForm::Inside(c) => Some(c),
    }
}

/// Shared scoring step for training and decoding. Ties break toward the
/// lexicographically first label because `labels` is sorted and only a
/// strictly greater score replaces the incumbent.
fn predict_step(
    weights: &[f64],
    forms: &[LabelForm],
    n_labels: usize,
    feature_ids: &[u32],
    prev: Option<usize>,
) -> usize {
    let prev_class = prev.and_then(|p| form_class(&forms[p]));
    let mut scores = vec![0.0f64; n_labels];
    for &f in feature_ids {
        let row = &weights[f as usize * n_labels..(f as usize + 1) * n_labels];
        for (s, w) in scores.iter_mut().zip(row) {
            *s += w;
        }
    }
    let mut best = None;
    let mut best_score = f64::NEG_INFINITY;
    for (l, form) in forms.iter().enumerate() {
        if !allowed(form, prev_class) {
            continue;
        }
        let mut score = scores[l];
        if matches!(form, LabelForm::Outside) {
            score += O_BIAS;
        }
        if score > best_score {
            best_score = score;
            best = Some(l);
        }
    }
    best.expect("'O' is always allowed")
}

/// Greedy left-to-right decoding with a hard BIO transition constraint; the
/// output is always BIO-valid.
pub fn decode(model: &TaggerModel, tokens: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut prev: Option<usize> = None;
    for i in 0..tokens.len() {
        let mut ids: Vec<u32> = featurize(tokens, i)
            .iter()
            .filter_map(|f| model.feature_id(f))
            .collect();
        let prev_feat = match prev {
            None => START_FEATURE.to_string(),
            Some(p) => format!("pl={}", model.labels[p]),
        };
        if let Some(id) = model.feature_id(&prev_feat) {
            ids.push(id);
        }
        let l = model.predict(&ids, prev);
        out.push(model.labels[l].clone());
        prev = Some(l);
    }
    out
}

/// Averaged-perceptron training over chunked sequences. Document order is
/// reshuffled by seed each epoch; greedy decoding with the current weights
/// drives the updates; the returned weights are the running average.
pub fn train_tagger(
    corpus: &Corpus,
    epochs: usize,
    chunk_words: usize,
    seed: u64,
) -> Result<TaggerModel> {
    if corpus.is_empty() {
        return Err(Error::validation("cannot train a tagger on an empty corpus"));
    }
    if corpus.label_set.is_empty() {
        return Err(Error::validation(
            "corpus has only O labels; no entity classes to learn",
        ));
    }
    if epochs == 0 || chunk_words == 0 {
        return Err(Error::validation("epochs and chunk_words must be >= 1"));
    }
    let classes: Vec<&str> = corpus.label_set.iter().map(String::as_str).collect();
    let labels = label_inventory(&classes);
    let forms = parse_forms(&labels)?;
    let n_labels = labels.len();
    let label_idx: HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();

    // Intern every feature up front so the weight matrix has a fixed size.
    let mut feature_index: HashMap<String, u32> = HashMap::new();
    let intern = |s: String, index: &mut HashMap<String, u32>| -> u32 {
        let next = index.len() as u32;
        *index.entry(s).or_insert(next)
    };
    let start_id = intern(START_FEATURE.to_string(), &mut feature_index);
    let prev_feat_ids: Vec<u32> = labels
        .iter()
        .map(|l| intern(format!("pl={l}"), &mut feature_index))
        .collect();

    struct Chunk {
        feats: Vec<Vec<u32>>,
        gold: Vec<usize>,
    }
    let mut chunks: Vec<Chunk> = Vec::new();
    for doc in &corpus.documents {
        for (tokens, gold_labels) in chunk_document(doc, chunk_words) {
            let feats = (0..tokens.len())
                .map(|i| {
                    featurize(tokens, i)
                        .into_iter()
                        .map(|f| intern(f, &mut feature_index))
                        .collect()
                })
                .collect();
            let gold = gold_labels
                .iter()
                .map(|l| label_idx[l.as_str()])
                .collect();
            chunks.push(Chunk { feats, gold });
        }
    }

    let n_features = feature_index.len();
    let mut weights = vec![0.0f64; n_features * n_labels];
    let mut totals = vec![0.0f64; n_features * n_labels];
    let mut stamps = vec![0u64; n_features * n_labels];
    let mut tick: u64 = 0;

    let update = |i: usize, delta: f64, tick: u64, weights: &mut [f64], totals: &mut [f64], stamps: &mut [u64]| {
        totals[i] += (tick - stamps[i]) as f64 * weights[i];
        stamps[i] = tick;
        weights[i] += delta;
    };

    let mut order: Vec<usize> = (0..chunks.len()).collect();
    for epoch in 0..epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::seed::derive_seed(seed, &[epoch as u64]));
        order.shuffle(&mut rng);
        for &ci in &order {
            let chunk = &chunks[ci];
            let mut prev: Option<usize> = None;
            for (feats, &gold) in chunk.feats.iter().zip(&chunk.gold) {
                let prev_feat = match prev {
                    None => start_id,
                    Some(p) => prev_feat_ids[p],
                };
                let mut ids = feats.clone();
                ids.push(prev_feat);
                let pred = predict_step(&weights, &forms, n_labels, &ids, prev);
                if pred != gold {
                    for &f in &ids {
                        let base = f as usize * n_labels;
                        update(base + gold, 1.0, tick, &mut weights, &mut totals, &mut stamps);
                        update(base + pred, -1.0, tick, &mut weights, &mut totals, &mut stamps);
                    }
                }
                prev = Some(pred);
                tick += 1;
            }
        }
    }

    if tick > 0 {
        for i in 0..weights.len() {
            totals[i] += (tick - stamps[i]) as f64 * weights[i];
            weights[i] = totals[i] / tick as f64;
        }
    }

    Ok(TaggerModel {
        labels,
        forms,
        feature_index,
        weights,
        feature_template_version: FEATURE_TEMPLATE_VERSION.to_string(),
        meta: TrainingMeta {
            epochs,
            chunk_words,
            seed,
        },
    })
}

/// Serialized form: weights keyed by feature string, zero rows dropped,
/// sorted for byte-stable output.
#[derive(Clone, Serialize, Deserialize)]
pub struct PortableTagger {
    labels: Vec<String>,
    feature_template_version: String,
    meta: TrainingMeta,
    weights: Vec<(String, Vec<f64>)>,
}

impl From<TaggerModel> for PortableTagger {
    fn from(model: TaggerModel) -> Self {
        let n = model.labels.len();
        let mut weights: Vec<(String, Vec<f64>)> = model
            .feature_index
            .iter()
            .filter_map(|(feature, &id)| {
                let row = model.weights[id as usize * n..(id as usize + 1) * n].to_vec();
                if row.iter().any(|w| w.abs() > 1e-12) {
                    Some((feature.clone(), row))
                } else {
                    None
                }
            })
            .collect();
        weights.sort_by(|a, b| a.0.cmp(&b.0));
        PortableTagger {
            labels: model.labels,
            feature_template_version: model.feature_template_version,
            meta: model.meta,
            weights,
        }
    }
}

impl TryFrom<PortableTagger> for TaggerModel {
    type Error = Error;

    fn try_from(p: PortableTagger) -> Result<Self> {
        let forms = parse_forms(&p.labels)?;
        let n = p.labels.len();
        let mut feature_index = HashMap::new();
        let mut weights = Vec::with_capacity(p.weights.len() * n);
        for (i, (feature, row)) in p.weights.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::validation(format!(
                    "weight row for {feature} has {} entries, expected {n}",
                    row.len()
                )));
            }
            feature_index.insert(feature, i as u32);
            weights.extend(row);
        }
        Ok(TaggerModel {
            labels: p.labels,
            forms,
            feature_index,
            weights,
            feature_template_version: p.feature_template_version,
            meta: p.meta,
        })
    }
}
