//! Text generation: a trainable backoff n-gram language model with
//! nucleus/temperature sampling, and the synthesis driver that turns
//! validation-set prompts into a synthetic corpus.

mod lm;
mod sampling;
mod synthesize;

pub use lm::{train_lm, NGramLM};
pub use sampling::{apply_temperature, nucleus_filter, sample_word};
pub use synthesize::{generate_document, resolve_max_tokens, synthesize_corpus};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Sampling knobs for document generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub top_p: f64,
    pub temperature: f64,
    pub min_tokens: usize,
    /// Usually derived via [`resolve_max_tokens`] from the validation slice.
    pub max_tokens: usize,
    pub samples_per_prompt: usize,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            top_p: 0.95,
            temperature: 1.0,
            min_tokens: 10,
            max_tokens: 50,
            samples_per_prompt: 80,
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(Error::validation(format!(
                "top_p must be in (0, 1], got {}",
                self.top_p
            )));
        }
        if self.temperature <= 0.0 {
            return Err(Error::validation(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if self.min_tokens > self.max_tokens {
            return Err(Error::validation(format!(
                "min_tokens ({}) exceeds max_tokens ({})",
                self.min_tokens, self.max_tokens
            )));
        }
        Ok(())
    }
}

/// Hyperparameters forwarded opaquely to remote training services.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteTrainingConfig {
    pub r: u32,
    pub alpha: u32,
    pub dropout: f64,
    pub weight_decay: f64,
    pub learning_rate: f64,
    pub batch_size: u32,
    pub epochs: u32,
}

impl Default for RemoteTrainingConfig {
    fn default() -> Self {
        RemoteTrainingConfig {
            r: 8,
            alpha: 32,
            dropout: 0.05,
            weight_decay: 0.1,
            learning_rate: 0.0001,
            batch_size: 16,
            epochs: 6,
        }
    }
}

/// Generic word stock for the untrained generator: the stand-in for a base
/// language model that has never seen in-domain text. Deliberately contains
/// almost no PII-like surface forms, so machine annotation of its output
/// yields few entities.
pub fn base_vocabulary() -> Vec<String> {
    [
        "och", "att", "det", "som", "en", "på", "är", "av", "för", "med", "till", "den", "har",
        "de", "inte", "om", "ett", "men", "var", "jag", "sig", "från", "vi", "så", "kan", "när",
        "han", "hon", "skulle", "kommer", "eller", "nu", "också", "efter", "upp", "vid", "mycket",
        "bara", "bli", "sedan", "över", "än", "någon", "alla", "går", "få", "utan", "vara", "där",
        "in", "sin", "du", "hade", "under", "ja", "sina", "här", "mot", "sa", "andra", "bra",
        "dag", "tid", "år", "man", "del", "gång", "sätt", "hand", "arbete", "plats", "fråga",
        "ord", "vecka", "natt", "morgon", "kväll", "huset", "vägen", "staden", "landet", "vatten",
        "mat", "bok", "bil", "dörr", "fönster", "bord", "stol", "rummet", "barn", "familj",
        "vänner", "mamma", "pappa", "lugn", "trött", "glad", "stor", "liten", "gammal", "ny",
        "lång", "kort", "varm", "kall", "ljus", "mörk", "Det", "Han", "Hon", "Vi", "De", "Sedan",
        "Under", "Efter", ".", ",",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}
