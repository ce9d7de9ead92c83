//! `synthner`: command-line front end for the synthetic NER corpus toolkit.
//!
//! Exit codes: 0 success, 1 validation/input error, 2 remote-service failure,
//! 3 partial run (some folds failed).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use synthner_core::annotation::{annotate_corpus, train_tagger, TaggerModel};
use synthner_core::corpus::{
    extract_prompts, make_template_corpus, parse_conll, read_jsonl, split_folds, write_conll,
    write_jsonl, Corpus, Language, TemplateSpec,
};
use synthner_core::generation::{
    resolve_max_tokens, synthesize_corpus, train_lm, GenerationConfig, NGramLM,
    RemoteTrainingConfig,
};
use synthner_core::metrics::{lexical_diversity, ngram_recall_report, token_f1, Granularity};
use synthner_core::pipeline::{
    emit_report, run_experiment, run_grid, AnnotatorConfig, CorpusFormat, ExperimentConfig,
    GeneratorConfig, GridAxis, GridResult, ReportFormat,
};
use synthner_core::remote::{adapt_remote, annotate_remote, train_remote};
use synthner_core::{Error, Result};

#[derive(Parser)]
#[command(name = "synthner", version, about = "Synthetic corpus pipeline for PII NER")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CorpusInput {
    /// Input corpus file.
    #[arg(long)]
    input: PathBuf,
    /// Corpus format; inferred from the extension when omitted.
    #[arg(long)]
    format: Option<CorpusFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a deterministic template corpus for desk-scale experiments.
    Template {
        #[arg(long, default_value_t = 500)]
        docs: usize,
        #[arg(long, default_value = "sv")]
        language: Language,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        format: Option<CorpusFormat>,
    },
    /// Split a corpus into a cross-validation fold plan.
    Split {
        #[command(flatten)]
        corpus: CorpusInput,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 0.05)]
        val_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fold plan output (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the native generator, or adapt a remote one.
    Adapt {
        #[command(flatten)]
        corpus: CorpusInput,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 0.1)]
        discount: f64,
        /// Remote generator endpoint; when set, the corpus is uploaded for
        /// adaptation instead of training locally.
        #[arg(long)]
        endpoint: Option<String>,
        /// Model output (JSON; native only).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus from document-prefix prompts.
    Synth {
        /// Trained generator model (from `adapt`).
        #[arg(long)]
        model: PathBuf,
        /// Corpus whose documents provide the prompts.
        #[command(flatten)]
        corpus: CorpusInput,
        #[arg(long, default_value_t = 3)]
        prompt_words: usize,
        #[arg(long, default_value_t = 80)]
        samples_per_prompt: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "sv")]
        language: Language,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the native BIO tagger.
    TrainNer {
        #[command(flatten)]
        corpus: CorpusInput,
        #[arg(long, default_value_t = 6)]
        epochs: usize,
        #[arg(long, default_value_t = 128)]
        chunk_words: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Remote annotator endpoint; when set, the corpus is uploaded for
        /// training instead.
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Machine-annotate a corpus with a trained tagger.
    Annotate {
        /// Trained tagger model (from `train-ner`); or use --endpoint.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        endpoint: Option<String>,
        #[command(flatten)]
        corpus: CorpusInput,
        #[arg(long)]
        out: PathBuf,
    },
    /// Token-level F1 of a predicted corpus against gold labels.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        predicted: PathBuf,
        #[arg(long)]
        format: Option<CorpusFormat>,
    },
    /// Lexical diversity and document statistics.
    Diversity {
        #[command(flatten)]
        corpus: CorpusInput,
        /// Stemmer language; defaults to the documents' language tag.
        #[arg(long)]
        language: Option<Language>,
    },
    /// General and sensitive n-gram recall of a candidate against a reference.
    Privacy {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
        /// Comma-separated n-gram orders.
        #[arg(long, default_value = "3,5,10", value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        format: Option<CorpusFormat>,
    },
    /// Run one full experiment (all folds) from a config file.
    Run {
        #[command(flatten)]
        overrides: ConfigOverrides,
        /// Report format for stdout.
        #[arg(long, default_value = "table")]
        report: String,
        /// Also write the full JSON results here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an ablation grid from a config file.
    Grid {
        #[command(flatten)]
        overrides: ConfigOverrides,
        /// Sweep axis, repeatable: da=0,0.05,0.95 | ma=... | mult=... | order=2,4
        #[arg(long = "axis")]
        axes: Vec<String>,
        #[arg(long, default_value = "table")]
        report: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-render stored grid results (JSON from `run`/`grid`) in any format.
    Report {
        /// Stored results file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "table")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Config-file plus per-flag overrides; any flag given on the command line
/// wins over the file.
#[derive(Args)]
struct ConfigOverrides {
    /// TOML config file mirroring the experiment configuration fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    corpus_format: Option<CorpusFormat>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    val_fraction: Option<f64>,
    #[arg(long)]
    da_fraction: Option<f64>,
    #[arg(long)]
    ma_fraction: Option<f64>,
    #[arg(long)]
    synth_multiplier: Option<f64>,
    /// Native generator LM order.
    #[arg(long)]
    generator_order: Option<usize>,
    /// Remote generator endpoint (switches the generator to remote).
    #[arg(long)]
    generator_endpoint: Option<String>,
    /// Remote annotator endpoint (switches the annotator to remote).
    #[arg(long)]
    annotator_endpoint: Option<String>,
}

impl ConfigOverrides {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.corpus {
            config.corpus_path = Some(v.clone());
        }
        if let Some(v) = self.corpus_format {
            config.corpus_format = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.folds {
            config.folds = v;
        }
        if let Some(v) = self.val_fraction {
            config.val_fraction = v;
        }
        if let Some(v) = self.da_fraction {
            config.da_fraction = v;
        }
        if let Some(v) = self.ma_fraction {
            config.ma_fraction = v;
        }
        if let Some(v) = self.synth_multiplier {
            config.synth_multiplier = v;
        }
        if let Some(order) = self.generator_order {
            config.generator = match config.generator {
                GeneratorConfig::Native { discount, .. } => GeneratorConfig::Native {
                    order,
                    discount,
                },
                remote @ GeneratorConfig::Remote { .. } => remote,
            };
        }
        if let Some(endpoint) = &self.generator_endpoint {
            config.generator = GeneratorConfig::Remote {
                endpoint: endpoint.clone(),
                training: RemoteTrainingConfig::default(),
            };
        }
        if let Some(endpoint) = &self.annotator_endpoint {
            config.annotator = AnnotatorConfig::Remote {
                endpoint: endpoint.clone(),
                training: RemoteTrainingConfig::default(),
            };
        }
        config.validate()?;
        Ok(config)
    }
}

fn infer_format(path: &Path, explicit: Option<CorpusFormat>) -> CorpusFormat {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") | Some("json") => CorpusFormat::Jsonl,
        _ => CorpusFormat::Conll,
    })
}

fn load_corpus(path: &Path, format: Option<CorpusFormat>) -> Result<Corpus> {
    let text = std::fs::read_to_string(path)?;
    match infer_format(path, format) {
        CorpusFormat::Jsonl => read_jsonl(&text),
        CorpusFormat::Conll => {
            let parsed = parse_conll(&text)?;
            for warning in &parsed.warnings {
                eprintln!(
                    "warning: {}: repaired {} -> {} at token {}",
                    warning.doc_id, warning.repair.from, warning.repair.to, warning.repair.position
                );
            }
            Ok(parsed.corpus)
        }
    }
}

fn save_corpus(corpus: &Corpus, path: &Path, format: Option<CorpusFormat>) -> Result<()> {
    let text = match infer_format(path, format) {
        CorpusFormat::Jsonl => write_jsonl(corpus),
        CorpusFormat::Conll => write_conll(corpus),
    };
    std::fs::write(path, text)?;
    Ok(())
}

fn load_experiment_corpus(config: &ExperimentConfig) -> Result<Corpus> {
    let path = config.corpus_path.as_ref().ok_or_else(|| {
        Error::validation("no corpus: set corpus_path in the config or pass --corpus")
    })?;
    load_corpus(path, Some(config.corpus_format))
}

fn parse_axis(text: &str) -> Result<GridAxis> {
    let (name, values) = text
        .split_once('=')
        .ok_or_else(|| Error::validation(format!("axis must look like name=v1,v2: {text}")))?;
    let floats = || -> Result<Vec<f64>> {
        values
            .split(',')
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::validation(format!("bad axis value: {v}")))
            })
            .collect()
    };
    match name {
        "da" | "da_fraction" => Ok(GridAxis::DaFraction(floats()?)),
        "ma" | "ma_fraction" => Ok(GridAxis::MaFraction(floats()?)),
        "mult" | "synth_multiplier" => Ok(GridAxis::SynthMultiplier(floats()?)),
        "order" | "generator_capacity" => Ok(GridAxis::GeneratorCapacity(
            values
                .split(',')
                .map(|v| {
                    v.parse::<usize>()
                        .map_err(|_| Error::validation(format!("bad axis value: {v}")))
                })
                .collect::<Result<Vec<usize>>>()?,
        )),
        other => Err(Error::validation(format!("unknown grid axis: {other}"))),
    }
}

fn write_or_print(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_grid(grid: &GridResult, report: &str, out: Option<&Path>) -> Result<u8> {
    let format: ReportFormat = report.parse()?;
    print!("{}", emit_report(grid, format)?);
    if let Some(path) = out {
        std::fs::write(path, emit_report(grid, ReportFormat::Json)?)?;
    }
    if grid.is_partial() {
        for (label, run) in &grid.cells {
            for (fold, message) in &run.failures {
                eprintln!("partial: cell {label} fold {fold}: {message}");
            }
        }
        return Ok(3);
    }
    Ok(0)
}

fn execute(command: Command) -> Result<u8> {
    match command {
        Command::Template {
            docs,
            language,
            seed,
            out,
            format,
        } => {
            let spec = match language {
                Language::Es => TemplateSpec::clinical_es(docs),
                _ => TemplateSpec::clinical_sv(docs),
            };
            let corpus = make_template_corpus(&spec, seed)?;
            save_corpus(&corpus, &out, format)?;
            eprintln!("wrote {} documents to {}", corpus.len(), out.display());
            Ok(0)
        }
        Command::Split {
            corpus,
            folds,
            val_fraction,
            seed,
            out,
        } => {
            let loaded = load_corpus(&corpus.input, corpus.format)?;
            let plan = split_folds(&loaded, folds, val_fraction, seed)?;
            std::fs::write(&out, serde_json::to_string_pretty(&plan)?)?;
            eprintln!("wrote {}-fold plan to {}", plan.k, out.display());
            Ok(0)
        }
        Command::Adapt {
            corpus,
            order,
            discount,
            endpoint,
            out,
        } => {
            let loaded = load_corpus(&corpus.input, corpus.format)?;
            match endpoint {
                Some(endpoint) => {
                    let model_id =
                        adapt_remote(&endpoint, &loaded, &RemoteTrainingConfig::default())?;
                    println!("{model_id}");
                }
                None => {
                    let lm = train_lm(&loaded, order, discount)?;
                    let out = out.ok_or_else(|| {
                        Error::validation("--out is required when training locally")
                    })?;
                    std::fs::write(&out, serde_json::to_string(&lm)?)?;
                    eprintln!("wrote order-{order} model to {}", out.display());
                }
            }
            Ok(0)
        }
        Command::Synth {
            model,
            corpus,
            prompt_words,
            samples_per_prompt,
            seed,
            language,
            out,
        } => {
            let lm: NGramLM = serde_json::from_str(&std::fs::read_to_string(&model)?)?;
            let source = load_corpus(&corpus.input, corpus.format)?;
            let prompts = extract_prompts(&source, prompt_words);
            let cfg = GenerationConfig {
                samples_per_prompt,
                max_tokens: resolve_max_tokens(&source)?,
                ..GenerationConfig::default()
            };
            let synthetic = synthesize_corpus(&lm, &prompts, &cfg, language, seed)?;
            save_corpus(&synthetic, &out, None)?;
            eprintln!("wrote {} documents to {}", synthetic.len(), out.display());
            Ok(0)
        }
        Command::TrainNer {
            corpus,
            epochs,
            chunk_words,
            seed,
            endpoint,
            out,
        } => {
            let loaded = load_corpus(&corpus.input, corpus.format)?;
            match endpoint {
                Some(endpoint) => {
                    let model_id =
                        train_remote(&endpoint, &loaded, &RemoteTrainingConfig::default())?;
                    println!("{model_id}");
                }
                None => {
                    let tagger = train_tagger(&loaded, epochs, chunk_words, seed)?;
                    let out = out.ok_or_else(|| {
                        Error::validation("--out is required when training locally")
                    })?;
                    std::fs::write(&out, serde_json::to_string(&tagger)?)?;
                    eprintln!("wrote tagger to {}", out.display());
                }
            }
            Ok(0)
        }
        Command::Annotate {
            model,
            endpoint,
            corpus,
            out,
        } => {
            let loaded = load_corpus(&corpus.input, corpus.format)?;
            let annotated = match (model, endpoint) {
                (Some(model), None) => {
                    let tagger: TaggerModel =
                        serde_json::from_str(&std::fs::read_to_string(&model)?)?;
                    annotate_corpus(&tagger, &loaded)?
                }
                (None, Some(endpoint)) => annotate_remote(&endpoint, &loaded)?,
                _ => {
                    return Err(Error::validation(
                        "exactly one of --model and --endpoint is required",
                    ))
                }
            };
            save_corpus(&annotated, &out, None)?;
            eprintln!("annotated {} documents to {}", annotated.len(), out.display());
            Ok(0)
        }
        Command::Eval {
            gold,
            predicted,
            format,
        } => {
            let gold = load_corpus(&gold, format)?;
            let predicted = load_corpus(&predicted, format)?;
            let report = token_f1(&gold, &predicted)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(0)
        }
        Command::Diversity { corpus, language } => {
            let loaded = load_corpus(&corpus.input, corpus.format)?;
            let language = language
                .or_else(|| loaded.documents.first().map(|d| d.language))
                .unwrap_or(Language::Other);
            let report = lexical_diversity(&loaded, language)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(0)
        }
        Command::Privacy {
            reference,
            candidate,
            n,
            format,
        } => {
            let reference = load_corpus(&reference, format)?;
            let candidate = load_corpus(&candidate, format)?;
            let reports = n
                .iter()
                .map(|&n| ngram_recall_report(&reference, &candidate, n, Granularity::Word))
                .collect::<Result<Vec<_>>>()?;
            println!("{}", serde_json::to_string_pretty(&reports)?);
            Ok(0)
        }
        Command::Run {
            overrides,
            report,
            out,
        } => {
            let config = overrides.resolve()?;
            let corpus = load_experiment_corpus(&config)?;
            let result = run_experiment(&config, &corpus)?;
            let grid = GridResult {
                cells: vec![("base".to_string(), result)],
            };
            emit_grid(&grid, &report, out.as_deref())
        }
        Command::Grid {
            overrides,
            axes,
            report,
            out,
        } => {
            let config = overrides.resolve()?;
            let corpus = load_experiment_corpus(&config)?;
            let axes = axes
                .iter()
                .map(|a| parse_axis(a))
                .collect::<Result<Vec<_>>>()?;
            let grid = run_grid(&config, &axes, &corpus)?;
            emit_grid(&grid, &report, out.as_deref())
        }
        Command::Report { input, format, out } => {
            let grid: GridResult = serde_json::from_str(&std::fs::read_to_string(&input)?)?;
            let format: ReportFormat = format.parse()?;
            write_or_print(&emit_report(&grid, format)?, out.as_deref())?;
            Ok(0)
        }
    }
}

fn exit_code(error: &Error) -> u8 {
    let mut current = error;
    loop {
        match current {
            Error::Stage { source, .. } => current = source,
            Error::RemoteUnavailable { .. }
            | Error::RemoteMalformed(_)
            | Error::RemoteValidation(_) => return 2,
            _ => return 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(error) => {
            eprintln!("error: {error}");
            let mut source = std::error::Error::source(&error);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(exit_code(&error))
        }
    }
}
