use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::exact::{Metric, DEFAULT_DENSE_CAP};
use crate::formulas::FormulaKind;
use crate::magnus::SplitMode;
use crate::models::{ModelKind, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Dense,
    Flo,
    Auto,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Dense => "dense",
            Engine::Flo => "flo",
            Engine::Auto => "auto",
        }
    }
}

/// `count` points from `min` to `max`, log-spaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Either an explicit list or a log-spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Log(LogRange),
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Log(r) if r.count == 1 => vec![r.min],
            Grid::Log(r) => {
                let (lo, hi) = (r.min.ln(), r.max.ln());
                (0..r.count).map(|i| (lo + (hi - lo) * i as f64 / (r.count - 1) as f64).exp()).collect()
            }
        }
    }

    fn check(&self, what: &str) -> Result<(), BenchError> {
        let pts = self.points();
        if pts.is_empty() {
            return Err(BenchError::Config(format!("{what} grid is empty")));
        }
        if let Grid::Log(r) = self {
            if !(r.min > 0.0 && r.max >= r.min) {
                return Err(BenchError::Config(format!("{what} log range needs 0 < min <= max")));
            }
        }
        if pts.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(BenchError::Config(format!("{what} grid values must be positive and finite")));
        }
        Ok(())
    }
}

fn default_engine() -> Engine {
    Engine::Auto
}

fn default_dense_cap() -> usize {
    DEFAULT_DENSE_CAP
}

/// A sweep description; read from JSON with unknown keys rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelSpec,
    pub metric: Metric,
    pub epsilon: f64,
    pub alpha: Grid,
    /// Evolution times for landscapes.
    pub time: Grid,
    pub budget: u64,
    pub formulas: Vec<FormulaKind>,
    pub n_max: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub rng_seed: u64,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    /// Worker threads; `None` uses all cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Slice splitting for Magnus-THRIFT; defaults to the order-matched split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnus_split: Option<SplitMode>,
    /// Replacement table for the 8th-order weights.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega8_path: Option<PathBuf>,
    #[serde(default = "default_dense_cap")]
    pub dense_cap: usize,
    /// Linear sizes for scaling sweeps.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<usize>,
    /// Scaling sweeps use `T = time_per_size * L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_per_size: Option<f64>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        let cfg: SweepConfig = serde_json::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, BenchError> {
        let p = path.as_ref();
        let text = std::fs::read_to_string(p).map_err(|e| BenchError::Config(format!("{}: {e}", p.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    /// Model with the sweep seed filled in for models that draw random fields.
    pub fn seeded_model(&self) -> ModelSpec {
        let mut m = self.model.clone();
        if m.kind == ModelKind::Heisenberg1d && m.rng_seed.is_none() {
            m.rng_seed = Some(self.rng_seed);
        }
        m
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        self.seeded_model().validate().map_err(|e| BenchError::Config(e.to_string()))?;
        self.alpha.check("alpha")?;
        self.time.check("time")?;
        if !(self.epsilon > 0.0 && self.epsilon < 2.0) {
            return Err(BenchError::Config(format!("epsilon {} outside (0, 2)", self.epsilon)));
        }
        if self.formulas.is_empty() {
            return Err(BenchError::Config("formula list is empty".into()));
        }
        if self.n_max == 0 {
            return Err(BenchError::Config("n_max must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(BenchError::Config("workers must be at least 1".into()));
        }
        if self.sizes.contains(&0) {
            return Err(BenchError::Config("sizes must be positive".into()));
        }
        if let Some(c) = self.time_per_size {
            if !(c > 0.0 && c.is_finite()) {
                return Err(BenchError::Config("time_per_size must be positive".into()));
            }
        }
        Ok(())
    }
}
