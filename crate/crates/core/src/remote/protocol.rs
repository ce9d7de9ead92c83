//! Wire types for the remote generator and annotator services.
//!
//! Generator: `POST /v1/generate` and `POST /v1/adapt`.
//! Annotator: `POST /v1/annotate` and `POST /v1/train`.
//! All bodies are JSON; responses are 200 on success.

use serde::{Deserialize, Serialize};

use crate::generation::{GenerationConfig, RemoteTrainingConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateRequest {
    pub prompts: Vec<String>,
    pub samples_per_prompt: usize,
    pub top_p: f64,
    pub temperature: f64,
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub training: RemoteTrainingConfig,
}

impl GenerateRequest {
    pub fn new(prompts: Vec<String>, cfg: &GenerationConfig, training: &RemoteTrainingConfig) -> Self {
        GenerateRequest {
            prompts,
            samples_per_prompt: cfg.samples_per_prompt,
            top_p: cfg.top_p,
            temperature: cfg.temperature,
            min_tokens: cfg.min_tokens,
            max_tokens: cfg.max_tokens,
            training: training.clone(),
        }
    }
}

/// Texts in (prompt, sample) order: all samples for prompt 0, then prompt 1, …
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateResponse {
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptRequest {
    pub corpus_jsonl: String,
    pub training: RemoteTrainingConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptResponse {
    pub model_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotateRequestDoc {
    pub id: String,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotateRequest {
    pub documents: Vec<AnnotateRequestDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotateResponseDoc {
    pub id: String,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotateResponse {
    pub documents: Vec<AnnotateResponseDoc>,
}

/// NER fine-tuning carries no LoRA fields; the rest mirrors [`AdaptRequest`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRequest {
    pub corpus_jsonl: String,
    pub training: NerTrainingConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerTrainingConfig {
    pub weight_decay: f64,
    pub learning_rate: f64,
    pub batch_size: u32,
    pub epochs: u32,
}

impl From<&RemoteTrainingConfig> for NerTrainingConfig {
    fn from(t: &RemoteTrainingConfig) -> Self {
        NerTrainingConfig {
            weight_decay: t.weight_decay,
            learning_rate: t.learning_rate,
            batch_size: t.batch_size,
            epochs: t.epochs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResponse {
    pub model_id: String,
}
