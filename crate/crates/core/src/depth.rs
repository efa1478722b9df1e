//! Gate-depth registry: affine depth formulas per (model, formula) and the
//! step counts they allow under a two-qubit-depth budget.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::formulas::FormulaKind;
use crate::models::ModelKind;

#[derive(Debug, Error)]
pub enum DepthError {
    #[error("no depth entry for {formula} on {model}")]
    Unregistered { model: ModelKind, formula: FormulaKind },
    #[error("registry line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("could not read registry {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("step count must be at least 1")]
    ZeroSteps,
}

/// `aN + b` with non-negative integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Affine {
    pub slope: u64,
    pub offset: u64,
}

impl Affine {
    pub fn at(self, n: u64) -> u64 {
        self.slope * n + self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthFormula {
    pub model: ModelKind,
    pub formula: FormulaKind,
    pub two_qubit: Affine,
    pub cnot: Affine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Depth {
    pub two_qubit: u64,
    pub cnot: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthRegistry {
    entries: BTreeMap<(ModelKind, FormulaKind), DepthFormula>,
}

const BUNDLED_REGISTRY: &str = include_str!("../data/depth_registry.csv");

impl DepthRegistry {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_REGISTRY).expect("bundled registry is valid")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, DepthError> {
        let p = path.as_ref();
        let text = std::fs::read_to_string(p).map_err(|source| DepthError::Io { path: p.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// CSV with header `model,formula,a,b,c,d`; `#` lines are comments.
    pub fn parse(text: &str) -> Result<Self, DepthError> {
        let mut entries = BTreeMap::new();
        let mut seen_header = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: String| DepthError::Parse { line: i + 1, msg };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !seen_header {
                if line != "model,formula,a,b,c,d" {
                    return Err(err(format!("expected header, found {line:?}")));
                }
                seen_header = true;
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 6 {
                return Err(err(format!("expected 6 columns, found {}", cols.len())));
            }
            let model = ModelKind::parse(cols[0]).ok_or_else(|| err(format!("unknown model {:?}", cols[0])))?;
            let formula = FormulaKind::parse(cols[1]).ok_or_else(|| err(format!("unknown formula {:?}", cols[1])))?;
            let num = |s: &str| s.parse::<u64>().map_err(|e| err(format!("{s:?}: {e}")));
            let (a, b, c, d) = (num(cols[2])?, num(cols[3])?, num(cols[4])?, num(cols[5])?);
            if a == 0 || c == 0 {
                return Err(err("depth must grow with N".into()));
            }
            let f = DepthFormula { model, formula, two_qubit: Affine { slope: a, offset: b }, cnot: Affine { slope: c, offset: d } };
            if entries.insert((model, formula), f).is_some() {
                return Err(err(format!("duplicate entry {model},{formula}")));
            }
        }
        Ok(DepthRegistry { entries })
    }

    pub fn formula(&self, model: ModelKind, formula: FormulaKind) -> Result<&DepthFormula, DepthError> {
        self.entries.get(&(model, formula)).ok_or(DepthError::Unregistered { model, formula })
    }

    pub fn depth(&self, model: ModelKind, formula: FormulaKind, n: u64) -> Result<Depth, DepthError> {
        if n == 0 {
            return Err(DepthError::ZeroSteps);
        }
        let f = self.formula(model, formula)?;
        Ok(Depth { two_qubit: f.two_qubit.at(n), cnot: f.cnot.at(n) })
    }

    /// Largest `N` whose two-qubit depth fits in `budget`; 0 when even one
    /// step exceeds it.
    pub fn steps_for_budget(&self, model: ModelKind, formula: FormulaKind, budget: u64) -> Result<u64, DepthError> {
        let f = self.formula(model, formula)?.two_qubit;
        Ok(if budget < f.offset { 0 } else { (budget - f.offset) / f.slope })
    }

    /// Registered formulas for a model, in registry order.
    pub fn formulas_for(&self, model: ModelKind) -> Vec<FormulaKind> {
        FormulaKind::ALL.into_iter().filter(|f| self.entries.contains_key(&(model, *f))).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &DepthFormula> {
        self.entries.values()
    }
}

pub fn depth(model: ModelKind, formula: FormulaKind, n: u64) -> Result<Depth, DepthError> {
    DepthRegistry::bundled().depth(model, formula, n)
}

pub fn steps_for_budget(model: ModelKind, formula: FormulaKind, budget: u64) -> Result<u64, DepthError> {
    DepthRegistry::bundled().steps_for_budget(model, formula, budget)
}
