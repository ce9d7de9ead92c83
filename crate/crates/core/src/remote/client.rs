//! HTTP clients for the remote generator and annotator services.
//!
//! Every call has a 3-attempt retry budget with exponential backoff. A
//! response that arrives but violates the wire contract (wrong cardinality,
//! wrong order, short texts, bad labels) is never retried: the service is up
//! but wrong, and the caller should see that immediately.

use std::time::Duration;

use crate::corpus::{validate_bio, write_jsonl, Corpus, Document, Language, Prompt};
use crate::error::Error;
use crate::generation::{GenerationConfig, RemoteTrainingConfig};
use crate::Result;

use super::protocol::*;

const RETRY_ATTEMPTS: u32 = 3;
const BACKOFF_BASE_MS: u64 = 100;

/// Documents per `/v1/annotate` request (Table 8's batch size, reused as the
/// protocol batching unit).
pub const ANNOTATE_BATCH_SIZE: usize = 16;

fn backoff(attempt: u32) -> Duration {
    Duration::from_millis(BACKOFF_BASE_MS << attempt)
}

fn post_json<Req: serde::Serialize, Resp: serde::de::DeserializeOwned>(
    agent: &ureq::Agent,
    url: &str,
    body: &Req,
) -> Result<Resp> {
    let mut last_error = String::new();
    for attempt in 0..RETRY_ATTEMPTS {
        if attempt > 0 {
            std::thread::sleep(backoff(attempt - 1));
        }
        match agent.post(url).send_json(body) {
            Ok(response) => {
                return response
                    .into_json::<Resp>()
                    .map_err(|e| Error::RemoteMalformed(format!("{url}: {e}")));
            }
            Err(ureq::Error::Status(code, _)) => {
                last_error = format!("{url} returned status {code}");
            }
            Err(ureq::Error::Transport(t)) => {
                last_error = format!("{url}: {t}");
            }
        }
    }
    Err(Error::RemoteUnavailable {
        attempts: RETRY_ATTEMPTS,
        message: last_error,
    })
}

fn make_agent() -> ureq::Agent {
    ureq::AgentBuilder::new()
        .timeout(Duration::from_secs(120))
        .build()
}

/// Asks the remote generator for `samples_per_prompt` texts per prompt and
/// re-tokenizes the returned texts by whitespace. Output matches
/// `synthesize_corpus`: ids encode (prompt, sample), labels are all "O".
pub fn generate_remote(
    endpoint: &str,
    prompts: &[Prompt],
    cfg: &GenerationConfig,
    training: &RemoteTrainingConfig,
    language: Language,
) -> Result<Corpus> {
    cfg.validate()?;
    if prompts.is_empty() {
        return Err(Error::validation("cannot generate from an empty prompt list"));
    }
    let request = GenerateRequest::new(
        prompts.iter().map(|p| p.words.join(" ")).collect(),
        cfg,
        training,
    );
    let agent = make_agent();
    let response: GenerateResponse =
        post_json(&agent, &format!("{endpoint}/v1/generate"), &request)?;

    let expected = prompts.len() * cfg.samples_per_prompt;
    if response.texts.len() != expected {
        return Err(Error::RemoteValidation(format!(
            "expected {expected} texts ({} prompts x {} samples), got {}",
            prompts.len(),
            cfg.samples_per_prompt,
            response.texts.len()
        )));
    }
    let mut documents = Vec::with_capacity(expected);
    for (i, text) in response.texts.iter().enumerate() {
        let p = i / cfg.samples_per_prompt;
        let s = i % cfg.samples_per_prompt;
        let words: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        if words.len() < cfg.min_tokens || words.len() > cfg.max_tokens {
            return Err(Error::RemoteValidation(format!(
                "text for prompt {p} sample {s} has {} tokens, outside [{}, {}]",
                words.len(),
                cfg.min_tokens,
                cfg.max_tokens
            )));
        }
        if !words.starts_with(&prompts[p].words) {
            return Err(Error::RemoteValidation(format!(
                "text for prompt {p} sample {s} does not start with the prompt"
            )));
        }
        documents.push(Document::unlabeled(
            format!("synth-p{p:05}-s{s:04}"),
            words,
            language,
        ));
    }
    Corpus::from_documents(documents)
}

/// Uploads a corpus for domain adaptation; returns the remote model id.
pub fn adapt_remote(
    endpoint: &str,
    corpus: &Corpus,
    training: &RemoteTrainingConfig,
) -> Result<String> {
    let request = AdaptRequest {
        corpus_jsonl: write_jsonl(corpus),
        training: training.clone(),
    };
    let agent = make_agent();
    let response: AdaptResponse = post_json(&agent, &format!("{endpoint}/v1/adapt"), &request)?;
    Ok(response.model_id)
}

/// Labels a corpus through the remote annotator, 16 documents per request.
/// Response labels are validated for cardinality, length, and BIO shape
/// before any document is accepted.
pub fn annotate_remote(endpoint: &str, corpus: &Corpus) -> Result<Corpus> {
    if corpus.is_empty() {
        return Err(Error::validation("cannot annotate an empty corpus"));
    }
    let agent = make_agent();
    let mut documents = Vec::with_capacity(corpus.len());
    for batch in corpus.documents.chunks(ANNOTATE_BATCH_SIZE) {
        let request = AnnotateRequest {
            documents: batch
                .iter()
                .map(|d| AnnotateRequestDoc {
                    id: d.id.clone(),
                    tokens: d.tokens.clone(),
                })
                .collect(),
        };
        let response: AnnotateResponse =
            post_json(&agent, &format!("{endpoint}/v1/annotate"), &request)?;
        if response.documents.len() != batch.len() {
            return Err(Error::RemoteValidation(format!(
                "batch of {} documents answered with {}",
                batch.len(),
                response.documents.len()
            )));
        }
        for (sent, got) in batch.iter().zip(response.documents) {
            if got.id != sent.id {
                return Err(Error::RemoteValidation(format!(
                    "response document {} out of order, expected {}",
                    got.id, sent.id
                )));
            }
            if got.labels.len() != sent.tokens.len() {
                return Err(Error::RemoteValidation(format!(
                    "document {}: {} labels for {} tokens",
                    sent.id,
                    got.labels.len(),
                    sent.tokens.len()
                )));
            }
            validate_bio(&got.labels).map_err(|message| {
                Error::RemoteValidation(format!("document {}: {message}", sent.id))
            })?;
            documents.push(Document {
                id: sent.id.clone(),
                tokens: sent.tokens.clone(),
                labels: got.labels,
                language: sent.language,
            });
        }
    }
    Corpus::from_documents(documents)
}

/// Uploads a labeled corpus for remote NER fine-tuning; returns the model id.
pub fn train_remote(
    endpoint: &str,
    corpus: &Corpus,
    training: &RemoteTrainingConfig,
) -> Result<String> {
    let request = TrainRequest {
        corpus_jsonl: write_jsonl(corpus),
        training: training.into(),
    };
    let agent = make_agent();
    let response: TrainResponse = post_json(&agent, &format!("{endpoint}/v1/train"), &request)?;
    Ok(response.model_id)
}
