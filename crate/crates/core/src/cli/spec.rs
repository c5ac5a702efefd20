//! Declarative JSON inputs for the subcommands.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{default_t_grid, Bifunction, Strategy, Verification};
use crate::error::{Error, Result};
use crate::hilbert::{ConvexSet, Vector};
use crate::mappings::{Mapping, OperatorClass};
use crate::schemes::{Problem, Schedule, Scheme, StopRule, TraceMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    TraceCsv,
    TraceJson,
    ReportJson,
    PlotdataCsv,
}

fn default_outputs() -> Vec<Output> {
    vec![Output::TraceCsv, Output::ReportJson]
}

/// Input of `run` and `compare`. `compare` reads `schemes` and falls back to
/// every scheme when it is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub problem: Problem,
    #[serde(default)]
    pub scheme: Option<Scheme>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schemes: Vec<Scheme>,
    pub schedule: Schedule,
    pub stop: StopRule,
    pub x1: Vector,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    #[serde(default)]
    pub trace_mode: TraceMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingCheckSpec {
    pub mapping: Mapping,
    pub classes: Vec<OperatorClass>,
    /// Required for the quasi-nonexpansive class.
    #[serde(default)]
    pub fixed_point: Option<Vector>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_checks")]
    pub n_pairs: usize,
    #[serde(default = "default_check_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BifunctionCheckSpec {
    pub bifunction: Bifunction,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_checks")]
    pub n_samples: usize,
    #[serde(default = "default_check_tol")]
    pub tol: f64,
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
}

/// `set` defaults to the bifunction's domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventSpec {
    pub bifunction: Bifunction,
    #[serde(default)]
    pub set: Option<ConvexSet>,
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub x: Option<Vector>,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub verify: Option<Verification>,
}

fn default_checks() -> usize {
    1000
}

fn default_check_tol() -> f64 {
    1e-8
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}

impl ExperimentSpec {
    pub fn apply_overrides(&mut self, seed: Option<u64>, max_iter: Option<usize>, tol: Option<f64>) {
        if let Some(seed) = seed {
            self.seed = seed;
        }
        if let Some(max_iter) = max_iter {
            self.stop.max_iter = max_iter;
        }
        if let Some(tol) = tol {
            self.stop.residual_tol = tol;
        }
    }
}
