//! Ablation grids: Cartesian expansion of a base config along chosen axes.

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::Error;
use crate::Result;

use super::config::{ExperimentConfig, GeneratorConfig};
use super::run::{run_experiment, RunResult};

/// One sweep dimension with its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", rename_all = "snake_case")]
pub enum GridAxis {
    DaFraction(Vec<f64>),
    MaFraction(Vec<f64>),
    SynthMultiplier(Vec<f64>),
    /// Native generator LM order, the stand-in for model size.
    GeneratorCapacity(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    /// Coordinate label, e.g. `da=0.05,mult=4`.
    pub label: String,
    pub config: ExperimentConfig,
}

/// `Display` for f64 already drops trailing zeros, so labels read
/// "da=0.05" and "mult=4".
fn format_value(v: f64) -> String {
    format!("{v}")
}

fn apply(axis: &GridAxis, index: usize, config: &mut ExperimentConfig) -> Result<String> {
    Ok(match axis {
        GridAxis::DaFraction(vs) => {
            config.da_fraction = vs[index];
            format!("da={}", format_value(vs[index]))
        }
        GridAxis::MaFraction(vs) => {
            config.ma_fraction = vs[index];
            format!("ma={}", format_value(vs[index]))
        }
        GridAxis::SynthMultiplier(vs) => {
            config.synth_multiplier = vs[index];
            format!("mult={}", format_value(vs[index]))
        }
        GridAxis::GeneratorCapacity(vs) => {
            match &mut config.generator {
                GeneratorConfig::Native { order, .. } => *order = vs[index],
                GeneratorConfig::Remote { .. } => {
                    return Err(Error::validation(
                        "generator_capacity axis requires the native generator",
                    ))
                }
            }
            format!("order={}", vs[index])
        }
    })
}

fn axis_len(axis: &GridAxis) -> usize {
    match axis {
        GridAxis::DaFraction(v) | GridAxis::MaFraction(v) | GridAxis::SynthMultiplier(v) => v.len(),
        GridAxis::GeneratorCapacity(v) => v.len(),
    }
}

/// Expands `base` along the axes. Empty axes yield a singleton grid equal to
/// the base config; otherwise the product is enumerated with the last axis
/// varying fastest.
pub fn ablation_grid(base: &ExperimentConfig, axes: &[GridAxis]) -> Result<Vec<GridCell>> {
    for axis in axes {
        if axis_len(axis) == 0 {
            return Err(Error::validation("grid axis with no values"));
        }
    }
    let total: usize = axes.iter().map(axis_len).product();
    let mut cells = Vec::with_capacity(total);
    for mut flat in 0..total {
        let mut indices = vec![0usize; axes.len()];
        for (slot, axis) in axes.iter().enumerate().rev() {
            let len = axis_len(axis);
            indices[slot] = flat % len;
            flat /= len;
        }
        let mut config = base.clone();
        let mut parts = Vec::with_capacity(axes.len());
        for (axis, &index) in axes.iter().zip(&indices) {
            parts.push(apply(axis, index, &mut config)?);
        }
        config.validate()?;
        let label = if parts.is_empty() {
            "base".to_string()
        } else {
            parts.join(",")
        };
        cells.push(GridCell { label, config });
    }
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub cells: Vec<(String, RunResult)>,
}

impl GridResult {
    pub fn is_partial(&self) -> bool {
        self.cells.iter().any(|(_, r)| r.is_partial())
    }

    pub fn get(&self, label: &str) -> Option<&RunResult> {
        self.cells.iter().find(|(l, _)| l == label).map(|(_, r)| r)
    }
}

/// Runs every cell of the expanded grid against the same corpus. Cells run
/// sequentially; folds inside each cell run in parallel.
pub fn run_grid(base: &ExperimentConfig, axes: &[GridAxis], corpus: &Corpus) -> Result<GridResult> {
    let cells = ablation_grid(base, axes)?;
    let mut results = Vec::with_capacity(cells.len());
    for cell in cells {
        let result = run_experiment(&cell.config, corpus)?;
        results.push((cell.label, result));
    }
    Ok(GridResult { cells: results })
}
