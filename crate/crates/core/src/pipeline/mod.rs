//! Experiment orchestration: configuration, fold execution, ablation grids,
//! aggregation, and report rendering.

mod config;
mod grid;
mod report;
mod run;

pub use config::{
    AnnotatorConfig, CorpusFormat, ExperimentConfig, GeneratorConfig, MetricsConfig,
};
pub use grid::{ablation_grid, run_grid, GridAxis, GridCell, GridResult};
pub use report::{emit_report, ReportFormat};
pub use run::{
    aggregate, mean_std, run_experiment, run_fold, FoldDiversity, FoldManifest, FoldResult,
    MeanStd, RunResult,
};
