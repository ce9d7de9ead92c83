//! Temperature scaling, nucleus (top-p) filtering, and categorical draws.
//!
//! The dense in-place routines are the single implementation; the string-keyed
//! functions wrap them for map-shaped distributions.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::Error;
use crate::Result;

/// Rescales `probs` to p^(1/t) and renormalizes. `t == 1.0` is an exact
/// identity.
pub(crate) fn temperature_in_place(probs: &mut [f64], t: f64) -> Result<()> {
    if t <= 0.0 {
        return Err(Error::validation(format!(
            "temperature must be positive, got {t}"
        )));
    }
    if t == 1.0 {
        return Ok(());
    }
    let inv = 1.0 / t;
    let mut sum = 0.0;
    for p in probs.iter_mut() {
        if *p > 0.0 {
            *p = p.powf(inv);
            sum += *p;
        }
    }
    if sum > 0.0 {
        for p in probs.iter_mut() {
            *p /= sum;
        }
    }
    Ok(())
}

/// Keeps the smallest prefix of the probability-sorted support whose
/// cumulative mass reaches `top_p` (ties broken by lexicographic rank), zeroes
/// the rest, and renormalizes over the kept set.
pub(crate) fn nucleus_in_place(probs: &mut [f64], lex_rank: &[u32], top_p: f64) {
    let mut order: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    order.sort_by(|&a, &b| {
        probs[b]
            .partial_cmp(&probs[a])
            .unwrap()
            .then(lex_rank[a].cmp(&lex_rank[b]))
    });
    let mut cumulative = 0.0;
    let mut kept = 0;
    for &i in &order {
        cumulative += probs[i];
        kept += 1;
        if cumulative >= top_p {
            break;
        }
    }
    for &i in &order[kept..] {
        probs[i] = 0.0;
    }
    if cumulative > 0.0 {
        for &i in &order[..kept] {
            probs[i] /= cumulative;
        }
    }
}

/// Categorical draw proportional to `probs`. Walks ids in index order, so the
/// result is a pure function of (probs, rng state).
pub(crate) fn sample_categorical<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut last_nonzero = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last_nonzero = i;
        u -= p;
        if u <= 0.0 {
            return i;
        }
    }
    last_nonzero
}

fn to_dense(dist: &BTreeMap<String, f64>) -> (Vec<&String>, Vec<f64>) {
    let words: Vec<&String> = dist.keys().collect();
    let probs: Vec<f64> = dist.values().copied().collect();
    (words, probs)
}

/// p_i' proportional to p_i^(1/t). `t = 1` returns the input unchanged.
pub fn apply_temperature(dist: &BTreeMap<String, f64>, t: f64) -> Result<BTreeMap<String, f64>> {
    let (words, mut probs) = to_dense(dist);
    temperature_in_place(&mut probs, t)?;
    Ok(words
        .into_iter()
        .cloned()
        .zip(probs)
        .collect())
}

/// Nucleus (top-p) filter over a word-keyed distribution. Ties in probability
/// are broken by lexicographic word order.
pub fn nucleus_filter(dist: &BTreeMap<String, f64>, top_p: f64) -> BTreeMap<String, f64> {
    let (words, mut probs) = to_dense(dist);
    // BTreeMap iterates in lexicographic order, so position is the lex rank.
    let lex_rank: Vec<u32> = (0..words.len() as u32).collect();
    nucleus_in_place(&mut probs, &lex_rank, top_p);
    words
        .into_iter()
        .cloned()
        .zip(probs)
        .filter(|&(_, p)| p > 0.0)
        .collect()
}

/// Draws one word from a word-keyed distribution with the same categorical
/// walk used during generation.
pub fn sample_word<R: Rng>(dist: &BTreeMap<String, f64>, rng: &mut R) -> Option<String> {
    if dist.is_empty() {
        return None;
    }
    let (words, probs) = to_dense(dist);
    Some(words[sample_categorical(&probs, rng)].clone())
}
