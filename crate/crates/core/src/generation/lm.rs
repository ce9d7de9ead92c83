//! Backoff n-gram language model with absolute discounting.
//!
//! Counts are kept for every context length from 0 (unigrams) up to
//! `order - 1`. The next-token distribution interpolates: at each level the
//! discount mass is redistributed over the shorter-context distribution, down
//! to a uniform floor over the vocabulary, so no context ever deadlocks.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::Error;
use crate::Result;

pub(crate) const BOS: u32 = 0;
pub(crate) const EOS: u32 = 1;
const BOS_WORD: &str = "<s>";
const EOS_WORD: &str = "</s>";

#[derive(Debug, Clone, PartialEq)]
struct ContextCounts {
    total: u64,
    /// (word id, count), sorted by word id.
    continuations: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PortableLm", try_from = "PortableLm")]
pub struct NGramLM {
    order: usize,
    discount: f64,
    /// Index 0 is BOS, 1 is EOS, the rest are corpus words.
    words: Vec<String>,
    index: HashMap<String, u32>,
    /// Lexicographic rank of each word id, for deterministic tie-breaking.
    lex_rank: Vec<u32>,
    /// counts[len] maps a context of `len` word ids to its continuations.
    counts: Vec<HashMap<Vec<u32>, ContextCounts>>,
}

impl NGramLM {
    /// Untrained model: every context falls through to a uniform distribution
    /// over `vocabulary` plus the end marker. Stands in for a base model with
    /// no domain adaptation.
    pub fn untrained(order: usize, discount: f64, vocabulary: &[String]) -> Result<Self> {
        validate_params(order, discount)?;
        if vocabulary.is_empty() {
            return Err(Error::validation("untrained model needs a vocabulary"));
        }
        let mut lm = NGramLM::empty(order, discount);
        for word in vocabulary {
            lm.intern(word);
        }
        lm.finish();
        Ok(lm)
    }

    fn empty(order: usize, discount: f64) -> Self {
        let words = vec![BOS_WORD.to_string(), EOS_WORD.to_string()];
        let mut index = HashMap::new();
        index.insert(BOS_WORD.to_string(), BOS);
        index.insert(EOS_WORD.to_string(), EOS);
        NGramLM {
            order,
            discount,
            words,
            index,
            lex_rank: Vec::new(),
            counts: vec![HashMap::new(); order],
        }
    }

    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), id);
        id
    }

    fn finish(&mut self) {
        let mut ids: Vec<u32> = (0..self.words.len() as u32).collect();
        ids.sort_by(|&a, &b| self.words[a as usize].cmp(&self.words[b as usize]));
        let mut rank = vec![0u32; self.words.len()];
        for (r, id) in ids.into_iter().enumerate() {
            rank[id as usize] = r as u32;
        }
        self.lex_rank = rank;
        for level in &mut self.counts {
            for ctx in level.values_mut() {
                ctx.continuations.sort_by_key(|&(w, _)| w);
            }
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Vocabulary size including the BOS/EOS markers.
    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub(crate) fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub(crate) fn word_id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub(crate) fn lex_ranks(&self) -> &[u32] {
        &self.lex_rank
    }

    fn apply_level(&self, ctx: &ContextCounts, probs: &mut [f64]) {
        let total = ctx.total as f64;
        let leftover = self.discount * ctx.continuations.len() as f64 / total;
        for p in probs.iter_mut() {
            *p *= leftover;
        }
        for &(w, c) in &ctx.continuations {
            probs[w as usize] += (c as f64 - self.discount) / total;
        }
    }

    /// Next-token distribution keyed by word; includes the `"</s>"` end
    /// marker. Sums to 1 within 1e-9 for any context.
    pub fn next_token_distribution(&self, context: &[&str]) -> std::collections::BTreeMap<String, f64> {
        let ids: Vec<Option<u32>> = context.iter().map(|w| self.word_id(w)).collect();
        let probs = self.dense_distribution(&ids);
        probs
            .iter()
            .enumerate()
            .filter(|&(id, &p)| id != BOS as usize && p > 0.0)
            .map(|(id, &p)| (self.words[id].to_string(), p))
            .collect()
    }

    /// Dense next-token distribution over word ids, indexed by id. BOS is
    /// never predicted; its slot is always zero. Levels are applied from the
    /// uniform floor upward through the unigram counts and successively longer
    /// usable context suffixes; an out-of-vocabulary word (`None`) invalidates
    /// every suffix containing it.
    pub(crate) fn dense_distribution(&self, context: &[Option<u32>]) -> Vec<f64> {
        let sampleable = self.words.len() - 1;
        let uniform = 1.0 / sampleable as f64;
        let mut probs = vec![uniform; self.words.len()];
        probs[BOS as usize] = 0.0;

        let max_len = self.order.saturating_sub(1).min(context.len());
        for len in 0..=max_len {
            if len == 0 {
                if let Some(ctx) = self.counts[0].get(&Vec::new()) {
                    self.apply_level(ctx, &mut probs);
                }
                continue;
            }
            let suffix = &context[context.len() - len..];
            if suffix.iter().any(|w| w.is_none()) {
                break;
            }
            let key: Vec<u32> = suffix.iter().map(|w| w.unwrap()).collect();
            let Some(ctx) = self.counts[len].get(&key) else {
                break;
            };
            self.apply_level(ctx, &mut probs);
        }
        probs
    }
}

fn validate_params(order: usize, discount: f64) -> Result<()> {
    if order < 2 {
        return Err(Error::validation(format!("order must be >= 2, got {order}")));
    }
    if !(discount > 0.0 && discount < 1.0) {
        return Err(Error::validation(format!(
            "discount must be in (0, 1), got {discount}"
        )));
    }
    Ok(())
}

/// Counts all n-grams of the corpus word streams, with BOS padding and a
/// terminal EOS per document. Deterministic.
pub fn train_lm(corpus: &Corpus, order: usize, discount: f64) -> Result<NGramLM> {
    validate_params(order, discount)?;
    if corpus.is_empty() || corpus.total_tokens() == 0 {
        return Err(Error::validation("cannot train a language model on an empty corpus"));
    }
    let mut lm = NGramLM::empty(order, discount);
    let mut temp: Vec<HashMap<Vec<u32>, HashMap<u32, u32>>> = vec![HashMap::new(); order];
    for doc in &corpus.documents {
        if doc.is_empty() {
            continue;
        }
        let mut stream: Vec<u32> = vec![BOS; order - 1];
        stream.extend(doc.tokens.iter().map(|t| lm.intern(t)));
        stream.push(EOS);
        for pos in (order - 1)..stream.len() {
            let target = stream[pos];
            for len in 0..order {
                let ctx = stream[pos - len..pos].to_vec();
                *temp[len].entry(ctx).or_default().entry(target).or_insert(0) += 1;
            }
        }
    }
    for (len, level) in temp.into_iter().enumerate() {
        for (ctx, conts) in level {
            let total = conts.values().map(|&c| u64::from(c)).sum();
            lm.counts[len].insert(
                ctx,
                ContextCounts {
                    total,
                    continuations: conts.into_iter().collect(),
                },
            );
        }
    }
    lm.finish();
    Ok(lm)
}

/// Serialized form: contexts sorted for byte-stable output.
#[derive(Clone, Serialize, Deserialize)]
pub struct PortableLm {
    order: usize,
    discount: f64,
    words: Vec<String>,
    contexts: Vec<(Vec<u32>, Vec<(u32, u32)>)>,
}

impl From<NGramLM> for PortableLm {
    fn from(lm: NGramLM) -> Self {
        let mut contexts: Vec<(Vec<u32>, Vec<(u32, u32)>)> = lm
            .counts
            .iter()
            .flat_map(|level| {
                level
                    .iter()
                    .map(|(ctx, c)| (ctx.clone(), c.continuations.clone()))
            })
            .collect();
        contexts.sort();
        PortableLm {
            order: lm.order,
            discount: lm.discount,
            words: lm.words,
            contexts,
        }
    }
}

impl TryFrom<PortableLm> for NGramLM {
    type Error = Error;

    fn try_from(p: PortableLm) -> Result<Self> {
        validate_params(p.order, p.discount)?;
        let mut lm = NGramLM::empty(p.order, p.discount);
        for word in p.words.iter().skip(2) {
            lm.intern(word);
        }
        for (ctx, continuations) in p.contexts {
            if ctx.len() >= p.order {
                return Err(Error::validation("context longer than model order"));
            }
            let total = continuations.iter().map(|&(_, c)| u64::from(c)).sum();
            lm.counts[ctx.len()].insert(
                ctx,
                ContextCounts {
                    total,
                    continuations,
                },
            );
        }
        lm.finish();
        Ok(lm)
    }
}
