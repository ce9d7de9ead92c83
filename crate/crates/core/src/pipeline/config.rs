//! Experiment configuration, loadable from a TOML file whose keys mirror the
//! struct fields exactly. Every field has a default, so a config file only
//! needs to state what it changes.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::corpus::Language;
use crate::error::Error;
use crate::generation::{GenerationConfig, RemoteTrainingConfig};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    #[default]
    Conll,
    Jsonl,
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conll" => Ok(CorpusFormat::Conll),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(Error::validation(format!("unknown corpus format: {other}"))),
        }
    }
}

/// Text generator: the native n-gram model, or a remote service speaking the
/// `/v1/generate` protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneratorConfig {
    Native { order: usize, discount: f64 },
    Remote {
        endpoint: String,
        #[serde(default)]
        training: RemoteTrainingConfig,
    },
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig::Native {
            order: 3,
            discount: 0.1,
        }
    }
}

/// Annotator: the native averaged-perceptron tagger, or a remote service
/// speaking the `/v1/annotate` protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AnnotatorConfig {
    Native { epochs: usize, chunk_words: usize },
    Remote {
        endpoint: String,
        #[serde(default)]
        training: RemoteTrainingConfig,
    },
}

impl Default for AnnotatorConfig {
    fn default() -> Self {
        AnnotatorConfig::Native {
            epochs: 6,
            chunk_words: 128,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricsConfig {
    /// N-gram orders for the privacy metrics.
    pub n_values: Vec<usize>,
    /// Stemmer language; `None` means follow the corpus documents.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub language: Option<Language>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            n_values: vec![3, 5, 10],
            language: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus_path: Option<PathBuf>,
    pub corpus_format: CorpusFormat,
    pub seed: u64,
    pub folds: usize,
    pub val_fraction: f64,
    /// Fraction of the non-test corpus used to adapt the generator; 0 means
    /// an unadapted (generic-vocabulary) generator.
    pub da_fraction: f64,
    /// Fraction of the non-test corpus used to train the machine annotator
    /// (which doubles as the gold baseline tagger).
    pub ma_fraction: f64,
    /// Synthetic corpus size as a multiple of the non-test corpus size.
    pub synth_multiplier: f64,
    /// Words taken from the start of each validation document as a prompt.
    pub prompt_words: usize,
    pub generator: GeneratorConfig,
    pub annotator: AnnotatorConfig,
    pub generation: GenerationConfig,
    pub metrics: MetricsConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            corpus_path: None,
            corpus_format: CorpusFormat::default(),
            seed: 0,
            folds: 5,
            val_fraction: 0.05,
            da_fraction: 0.95,
            ma_fraction: 0.95,
            synth_multiplier: 4.0,
            prompt_words: 3,
            generator: GeneratorConfig::default(),
            annotator: AnnotatorConfig::default(),
            generation: GenerationConfig::default(),
            metrics: MetricsConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::validation(format!(
                "folds must be >= 2, got {}",
                self.folds
            )));
        }
        for (name, value) in [
            ("da_fraction", self.da_fraction),
            ("ma_fraction", self.ma_fraction),
        ] {
            if !(0.0..=0.95).contains(&value) {
                return Err(Error::validation(format!(
                    "{name} must be in [0, 0.95], got {value}"
                )));
            }
        }
        if self.ma_fraction <= 0.0 {
            return Err(Error::validation(
                "ma_fraction must be positive: the annotator needs training data",
            ));
        }
        if !(self.synth_multiplier > 0.0) {
            return Err(Error::validation(format!(
                "synth_multiplier must be positive, got {}",
                self.synth_multiplier
            )));
        }
        if !(0.0..1.0).contains(&self.val_fraction) {
            return Err(Error::validation(format!(
                "val_fraction must be in [0, 1), got {}",
                self.val_fraction
            )));
        }
        if self.prompt_words == 0 {
            return Err(Error::validation("prompt_words must be >= 1"));
        }
        if self.metrics.n_values.is_empty() {
            return Err(Error::validation("metrics.n_values must not be empty"));
        }
        match &self.generator {
            GeneratorConfig::Native { order, discount } => {
                if *order == 0 {
                    return Err(Error::validation("generator order must be >= 1"));
                }
                if !(0.0..1.0).contains(discount) {
                    return Err(Error::validation(format!(
                        "generator discount must be in [0, 1), got {discount}"
                    )));
                }
            }
            GeneratorConfig::Remote { endpoint, .. } => {
                if endpoint.is_empty() {
                    return Err(Error::validation("generator endpoint must not be empty"));
                }
            }
        }
        if let AnnotatorConfig::Native { epochs, chunk_words } = &self.annotator {
            if *epochs == 0 || *chunk_words == 0 {
                return Err(Error::validation(
                    "annotator epochs and chunk_words must be >= 1",
                ));
            }
        }
        self.generation.validate()
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::validation(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_match_the_reference_setup() {
        let config = ExperimentConfig::default();
        config.validate().unwrap();
        assert_eq!(config.folds, 5);
        assert_eq!(config.val_fraction, 0.05);
        assert_eq!(config.generation.samples_per_prompt, 80);
        assert_eq!(config.generation.min_tokens, 10);
        assert_eq!(config.prompt_words, 3);
        assert_eq!(config.metrics.n_values, vec![3, 5, 10]);
    }

    #[test]
    fn toml_round_trip() {
        let mut config = ExperimentConfig::default();
        config.da_fraction = 0.25;
        config.generator = GeneratorConfig::Remote {
            endpoint: "http://localhost:9000".into(),
            training: RemoteTrainingConfig::default(),
        };
        let text = config.to_toml();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn partial_toml_fills_defaults() {
        let config = ExperimentConfig::from_toml("seed = 42\nda_fraction = 0.5\n").unwrap();
        assert_eq!(config.seed, 42);
        assert_eq!(config.da_fraction, 0.5);
        assert_eq!(config.folds, 5);
    }

    #[test]
    fn nested_tables_parse() {
        let text = r#"
            [generator]
            kind = "native"
            order = 2
            discount = 0.05

            [annotator]
            kind = "native"
            epochs = 3
            chunk_words = 64
        "#;
        let config = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(
            config.generator,
            GeneratorConfig::Native {
                order: 2,
                discount: 0.05
            }
        );
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(ExperimentConfig::from_toml("da_fraction = 0.96").is_err());
        assert!(ExperimentConfig::from_toml("synth_multiplier = 0.0").is_err());
        assert!(ExperimentConfig::from_toml("folds = 1").is_err());
        let mut config = ExperimentConfig::default();
        config.metrics.n_values.clear();
        assert!(config.validate().is_err());
    }
}
