//! Document-level k-fold splitting with a per-fold validation slice.
//!
//! Documents are shuffled once by seed. Fold i takes the i-th 1/k share of the
//! shuffled order as its held-out test set. The remaining documents, still in
//! shuffled order, end with the validation slice (the last ceil(val_fraction x
//! remainder), at least 1) and the rest form the train pool. Training subsets
//! are prefixes of the non-test order, so smaller fractions nest inside larger
//! ones.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Corpus;
use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub test_ids: Vec<String>,
    pub validation_ids: Vec<String>,
    pub train_pool_ids: Vec<String>,
}

impl Fold {
    /// Non-test documents in shuffled order: train pool first, then the
    /// validation slice.
    pub fn non_test_ids(&self) -> Vec<String> {
        let mut ids = self.train_pool_ids.clone();
        ids.extend(self.validation_ids.iter().cloned());
        ids
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<Fold>,
}

pub fn split_folds(corpus: &Corpus, k: usize, val_fraction: f64, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::validation(format!("k must be >= 2, got {k}")));
    }
    if corpus.len() < k {
        return Err(Error::validation(format!(
            "corpus has {} documents but k = {k}",
            corpus.len()
        )));
    }
    if !(0.0..1.0).contains(&val_fraction) {
        return Err(Error::validation(format!(
            "val_fraction must be in [0, 1), got {val_fraction}"
        )));
    }

    let mut ids: Vec<String> = corpus.documents.iter().map(|d| d.id.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);

    let n = ids.len();
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = base + usize::from(i < extra);
        let test_range = start..start + size;
        let test_ids: Vec<String> = ids[test_range.clone()].to_vec();
        let remainder: Vec<String> = ids[..test_range.start]
            .iter()
            .chain(&ids[test_range.end..])
            .cloned()
            .collect();
        let val_size = ((val_fraction * remainder.len() as f64).ceil() as usize).max(1);
        let val_size = val_size.min(remainder.len());
        let split = remainder.len() - val_size;
        folds.push(Fold {
            test_ids,
            validation_ids: remainder[split..].to_vec(),
            train_pool_ids: remainder[..split].to_vec(),
        });
        start += size;
    }
    Ok(FoldPlan { k, seed, folds })
}

/// Deterministic training subset: the prefix of the fold's shuffled non-test
/// documents of size round(fraction x non-test count), clamped to the train
/// pool so it never touches the validation slice.
pub fn subset_training(corpus: &Corpus, fold: &Fold, fraction: f64) -> Result<Corpus> {
    if !(0.0..=0.95).contains(&fraction) {
        return Err(Error::validation(format!(
            "training fraction must be in [0, 0.95] (the last 5% is reserved for validation), got {fraction}"
        )));
    }
    let non_test = fold.train_pool_ids.len() + fold.validation_ids.len();
    let take = (fraction * non_test as f64).round() as usize;
    let take = take.min(fold.train_pool_ids.len());
    corpus.select(&fold.train_pool_ids[..take])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Language};
    use std::collections::BTreeSet;

    fn corpus(n: usize) -> Corpus {
        let docs = (0..n)
            .map(|i| {
                Document::unlabeled(format!("d{i}"), vec![format!("w{i}")], Language::Other)
            })
            .collect();
        Corpus::from_documents(docs).unwrap()
    }

    #[test]
    fn hundred_docs_five_folds() {
        let c = corpus(100);
        let plan = split_folds(&c, 5, 0.05, 7).unwrap();
        for fold in &plan.folds {
            assert_eq!(fold.test_ids.len(), 20);
            assert_eq!(fold.validation_ids.len(), 4);
            assert_eq!(fold.train_pool_ids.len(), 76);
        }
    }

    #[test]
    fn two_docs_two_folds_boundary() {
        let c = corpus(2);
        let plan = split_folds(&c, 2, 0.05, 7).unwrap();
        for fold in &plan.folds {
            assert_eq!(fold.test_ids.len(), 1);
            assert_eq!(fold.validation_ids.len(), 1);
            assert!(fold.train_pool_ids.is_empty());
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let c = corpus(50);
        assert_eq!(
            split_folds(&c, 5, 0.05, 123).unwrap(),
            split_folds(&c, 5, 0.05, 123).unwrap()
        );
        assert_ne!(
            split_folds(&c, 5, 0.05, 123).unwrap(),
            split_folds(&c, 5, 0.05, 124).unwrap()
        );
    }

    #[test]
    fn test_sets_partition_the_corpus() {
        let c = corpus(103);
        let plan = split_folds(&c, 5, 0.05, 9).unwrap();
        let mut seen = BTreeSet::new();
        for fold in &plan.folds {
            for id in &fold.test_ids {
                assert!(seen.insert(id.clone()), "id {id} in two test sets");
            }
        }
        assert_eq!(seen.len(), 103);
    }

    #[test]
    fn per_fold_sets_disjoint_and_exhaustive() {
        let c = corpus(47);
        let plan = split_folds(&c, 5, 0.05, 3).unwrap();
        for fold in &plan.folds {
            let mut all = BTreeSet::new();
            for id in fold
                .test_ids
                .iter()
                .chain(&fold.validation_ids)
                .chain(&fold.train_pool_ids)
            {
                assert!(all.insert(id.clone()), "id {id} in two sets");
            }
            assert_eq!(all.len(), 47);
        }
    }

    #[test]
    fn corpus_smaller_than_k_errors() {
        let c = corpus(3);
        assert!(split_folds(&c, 5, 0.05, 0).is_err());
    }

    #[test]
    fn subset_at_95_percent_equals_train_pool() {
        let c = corpus(100);
        let plan = split_folds(&c, 5, 0.05, 11).unwrap();
        let fold = &plan.folds[0];
        let subset = subset_training(&c, fold, 0.95).unwrap();
        assert_eq!(subset.len(), 76);
        let ids: Vec<String> = subset.documents.iter().map(|d| d.id.clone()).collect();
        assert_eq!(ids, fold.train_pool_ids);
    }

    #[test]
    fn subsets_nest() {
        let c = corpus(100);
        let plan = split_folds(&c, 5, 0.05, 11).unwrap();
        let fold = &plan.folds[2];
        let small = subset_training(&c, fold, 0.05).unwrap();
        let large = subset_training(&c, fold, 0.25).unwrap();
        assert_eq!(small.len(), 4);
        assert_eq!(large.len(), 20);
        let large_ids: BTreeSet<_> = large.documents.iter().map(|d| &d.id).collect();
        assert!(small.documents.iter().all(|d| large_ids.contains(&d.id)));
    }

    #[test]
    fn subset_is_deterministic_and_bounded() {
        let c = corpus(100);
        let plan = split_folds(&c, 5, 0.05, 11).unwrap();
        let fold = &plan.folds[0];
        assert_eq!(
            subset_training(&c, fold, 0.95).unwrap(),
            subset_training(&c, fold, 0.95).unwrap()
        );
        assert!(subset_training(&c, fold, 0.96).is_err());
    }
}
