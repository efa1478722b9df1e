//! Browser bindings for three interactive views of `thrift-core`: error
//! against step count for long Ising chains, a best-formula landscape, and
//! the depth tables. Every export returns a JSON string for the page to draw.

use serde::Serialize;
use thrift_core::bench::{depth_tables, landscape, BenchError, Engine, EngineOptions, Grid, LogRange, PointEvaluator, SweepConfig};
use thrift_core::depth::DepthRegistry;
use thrift_core::exact::{Metric, DEFAULT_DENSE_CAP};
use thrift_core::formulas::{FormulaKind, Omega8};
use thrift_core::models::{build_model, ModelKind, ModelSpec};
use wasm_bindgen::prelude::*;

/// Longest chain the error-curve view accepts.
pub const MAX_CHAIN: usize = 200;
/// Largest chain the landscape view simulates densely.
pub const MAX_LANDSCAPE_CHAIN: usize = 8;
const MAX_GRID: usize = 24;

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Bench(#[from] BenchError),
}

fn parse_formulas(list: &str) -> Result<Vec<FormulaKind>, DemoError> {
    let kinds = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| FormulaKind::parse(s).ok_or_else(|| DemoError::Input(format!("unknown formula {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if kinds.is_empty() {
        return Err(DemoError::Input("choose at least one formula".into()));
    }
    Ok(kinds)
}

fn check_positive(name: &str, v: f64) -> Result<(), DemoError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(DemoError::Input(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Debug, Serialize)]
pub struct Curve {
    pub formula: &'static str,
    pub steps: Vec<u64>,
    pub error: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct CurveSet {
    pub chain: usize,
    pub alpha: f64,
    pub time: f64,
    pub engine: &'static str,
    pub curves: Vec<Curve>,
}

/// Worst-case error of each formula at `N = 1, 2, 4, ..` up to `n_max` for
/// a transverse-field Ising chain with unit field and coupling `alpha`.
pub fn error_curves(chain: usize, alpha: f64, time: f64, formulas: &str, n_max: u64) -> Result<CurveSet, DemoError> {
    if !(2..=MAX_CHAIN).contains(&chain) {
        return Err(DemoError::Input(format!("chain length must lie in 2..={MAX_CHAIN}")));
    }
    check_positive("time", time)?;
    if !alpha.is_finite() {
        return Err(DemoError::Input("alpha must be finite".into()));
    }
    let kinds = parse_formulas(formulas)?;
    let opts = EngineOptions { engine: Engine::Flo, metric: Metric::WorstCase, dense_cap: DEFAULT_DENSE_CAP, magnus_split: None, omega8: Omega8::bundled() };
    let part = build_model(&ModelSpec::tfim_1d(chain, 1.0, alpha)).map_err(BenchError::from)?;
    let eval = PointEvaluator::new(part, &opts)?;
    let reference = eval.reference(time)?;
    let ladder: Vec<u64> = std::iter::successors(Some(1u64), |n| n.checked_mul(2)).take_while(|n| *n <= n_max.max(1)).collect();
    let mut curves = Vec::new();
    for kind in kinds {
        let runner = eval.runner(kind)?;
        let error = ladder.iter().map(|&n| runner.error(&reference, time, n).map(|e| e.error)).collect::<Result<Vec<_>, _>>()?;
        curves.push(Curve { formula: kind.name(), steps: ladder.clone(), error });
    }
    Ok(CurveSet { chain, alpha, time, engine: eval.engine.name(), curves })
}

#[derive(Debug, Serialize)]
pub struct Cell {
    pub alpha: f64,
    pub time: f64,
    pub best: Option<&'static str>,
    pub error: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct LandscapeView {
    pub alphas: Vec<f64>,
    pub times: Vec<f64>,
    pub cells: Vec<Cell>,
    pub warnings: Vec<String>,
}

/// Best formula on a log-spaced `(alpha, T)` grid for an Ising chain at a
/// fixed two-qubit depth budget.
pub fn landscape_view(chain: usize, budget: u64, formulas: &str, resolution: usize) -> Result<LandscapeView, DemoError> {
    if !(2..=MAX_LANDSCAPE_CHAIN).contains(&chain) {
        return Err(DemoError::Input(format!("chain length must lie in 2..={MAX_LANDSCAPE_CHAIN}")));
    }
    if !(2..=MAX_GRID).contains(&resolution) {
        return Err(DemoError::Input(format!("resolution must lie in 2..={MAX_GRID}")));
    }
    let cfg = SweepConfig {
        model: ModelSpec::tfim_1d(chain, 1.0, 0.1),
        metric: Metric::WorstCase,
        epsilon: 0.01,
        alpha: Grid::Log(LogRange { min: 1e-3, max: 1.0, count: resolution }),
        time: Grid::Log(LogRange { min: 0.1, max: 10.0, count: resolution }),
        budget,
        formulas: parse_formulas(formulas)?,
        n_max: 1,
        output: None,
        rng_seed: 0,
        engine: Engine::Dense,
        workers: None,
        magnus_split: None,
        omega8_path: None,
        dense_cap: DEFAULT_DENSE_CAP,
        sizes: Vec::new(),
        time_per_size: None,
    };
    let land = landscape(&cfg)?;
    let (alphas, times) = (cfg.alpha.points(), cfg.time.points());
    let mut cells = Vec::new();
    for &alpha in &alphas {
        for &time in &times {
            let best = land.rows.iter().find(|r| r.is_best && r.alpha == alpha && r.t == time);
            cells.push(Cell { alpha, time, best: best.map(|r| r.formula.name()), error: best.map(|r| r.error.error) });
        }
    }
    Ok(LandscapeView { alphas, times, cells, warnings: land.warnings })
}

#[derive(Debug, Serialize)]
pub struct TableRow {
    pub formula: &'static str,
    pub two_qubit: String,
    pub cnot: String,
    pub steps: u64,
}

/// Depth formulas for one model and the step counts that fit `budget`.
pub fn depth_table(model: &str, budget: u64) -> Result<Vec<TableRow>, DemoError> {
    let kind = ModelKind::parse(model).ok_or_else(|| DemoError::Input(format!("unknown model {model:?}")))?;
    let rows = depth_tables(&DepthRegistry::bundled(), Some(budget))?;
    Ok(rows
        .into_iter()
        .filter(|r| r.model == kind)
        .map(|r| TableRow { formula: r.formula.name(), two_qubit: r.two_qubit, cnot: r.cnot, steps: r.steps })
        .collect())
}

fn to_js<T: Serialize>(r: Result<T, DemoError>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = errorCurves)]
pub fn error_curves_js(chain: usize, alpha: f64, time: f64, formulas: &str, n_max: u32) -> Result<String, JsError> {
    to_js(error_curves(chain, alpha, time, formulas, n_max as u64))
}

#[wasm_bindgen(js_name = landscapeView)]
pub fn landscape_view_js(chain: usize, budget: u32, formulas: &str, resolution: usize) -> Result<String, JsError> {
    to_js(landscape_view(chain, budget as u64, formulas, resolution))
}

#[wasm_bindgen(js_name = depthTable)]
pub fn depth_table_js(model: &str, budget: u32) -> Result<String, JsError> {
    to_js(depth_table(model, budget as u64))
}
