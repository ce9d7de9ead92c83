//! Token-level F1 with micro averaging over entity classes.
//!
//! A token is a true positive for class c when the gold and predicted classes
//! (B/I prefix ignored) are both c. "O" is never a positive class.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{label_class, Corpus};
use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F1Report {
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    pub per_class: BTreeMap<String, ClassScore>,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
}

fn ratio(num: u64, denom: u64) -> f64 {
    if denom == 0 {
        0.0
    } else {
        num as f64 / denom as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn token_f1(gold: &Corpus, predicted: &Corpus) -> Result<F1Report> {
    if gold.len() != predicted.len() {
        return Err(Error::validation(format!(
            "gold has {} documents, predicted has {}",
            gold.len(),
            predicted.len()
        )));
    }
    let by_id: HashMap<&str, &crate::corpus::Document> = predicted
        .documents
        .iter()
        .map(|d| (d.id.as_str(), d))
        .collect();

    let mut tp: BTreeMap<String, u64> = BTreeMap::new();
    let mut fp: BTreeMap<String, u64> = BTreeMap::new();
    let mut fn_: BTreeMap<String, u64> = BTreeMap::new();

    for gold_doc in &gold.documents {
        let pred_doc = by_id.get(gold_doc.id.as_str()).ok_or_else(|| Error::Document {
            id: gold_doc.id.clone(),
            message: "missing from predicted corpus".into(),
        })?;
        if gold_doc.tokens != pred_doc.tokens {
            return Err(Error::Document {
                id: gold_doc.id.clone(),
                message: "token sequences differ between gold and predicted".into(),
            });
        }
        for (g, p) in gold_doc.labels.iter().zip(&pred_doc.labels) {
            let gc = label_class(g);
            let pc = label_class(p);
            match (gc, pc) {
                (Some(g), Some(p)) if g == p => *tp.entry(g.to_string()).or_default() += 1,
                (gc, pc) => {
                    if let Some(p) = pc {
                        *fp.entry(p.to_string()).or_default() += 1;
                    }
                    if let Some(g) = gc {
                        *fn_.entry(g.to_string()).or_default() += 1;
                    }
                }
            }
        }
    }

    let mut classes: std::collections::BTreeSet<String> = tp.keys().cloned().collect();
    classes.extend(fp.keys().cloned());
    classes.extend(fn_.keys().cloned());
    classes.extend(gold.label_set.iter().cloned());

    let mut per_class = BTreeMap::new();
    let (mut tps, mut fps, mut fns) = (0u64, 0u64, 0u64);
    for class in classes {
        let t = tp.get(&class).copied().unwrap_or(0);
        let f = fp.get(&class).copied().unwrap_or(0);
        let n = fn_.get(&class).copied().unwrap_or(0);
        tps += t;
        fps += f;
        fns += n;
        let precision = ratio(t, t + f);
        let recall = ratio(t, t + n);
        per_class.insert(
            class,
            ClassScore {
                precision,
                recall,
                f1: harmonic(precision, recall),
                support: t + n,
            },
        );
    }

    let micro_precision = ratio(tps, tps + fps);
    let micro_recall = ratio(tps, tps + fns);
    Ok(F1Report {
        micro_precision,
        micro_recall,
        micro_f1: harmonic(micro_precision, micro_recall),
        per_class,
        true_positives: tps,
        false_positives: fps,
        false_negatives: fns,
    })
}
