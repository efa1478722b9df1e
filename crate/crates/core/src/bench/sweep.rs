use std::collections::BTreeMap;

use super::{parallel_map, BenchError, EngineOptions, ErrorValue, PointEvaluator, ResolvedEngine, SweepConfig};
use crate::depth::DepthRegistry;
use crate::exact::{Metric, DEFAULT_DENSE_CAP};
use crate::formulas::{thrift_error_bound, FormulaKind};
use crate::magnus::{convergence_series, magnus_remainder_bound, MAX_SERIES_ORDER};
use crate::models::{build_model, ModelKind, ModelSpec};
use crate::pauli::spectral_norm;

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeRow {
    pub model: ModelKind,
    pub engine: ResolvedEngine,
    pub seed: u64,
    pub alpha: f64,
    pub t: f64,
    pub budget: u64,
    pub formula: FormulaKind,
    pub steps: u64,
    pub two_qubit_depth: u64,
    pub cnot_depth: u64,
    pub metric: Metric,
    pub error: ErrorValue,
    pub is_best: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Landscape {
    pub rows: Vec<LandscapeRow>,
    pub warnings: Vec<String>,
}

impl Landscape {
    /// Winning formula at a grid point, if any row was emitted there.
    pub fn best_at(&self, alpha: f64, t: f64) -> Option<FormulaKind> {
        self.rows.iter().find(|r| r.is_best && r.alpha == alpha && r.t == t).map(|r| r.formula)
    }
}

/// Formulas sorted by name with duplicates removed, so that the output does
/// not depend on the order given in the config.
fn canonical_formulas(formulas: &[FormulaKind]) -> Vec<FormulaKind> {
    let mut f = formulas.to_vec();
    f.sort_by_key(|k| k.name());
    f.dedup();
    f
}

/// Error of every formula at its largest step count within the budget, on
/// the full `(alpha, T)` grid, with the best formula marked per point.
pub fn landscape(cfg: &SweepConfig) -> Result<Landscape, BenchError> {
    cfg.validate()?;
    let opts = EngineOptions::from_config(cfg)?;
    let registry = DepthRegistry::bundled();
    let model = cfg.seeded_model();
    let mut out = Landscape::default();

    let mut plan = Vec::new();
    for f in canonical_formulas(&cfg.formulas) {
        let steps = registry.steps_for_budget(model.kind, f, cfg.budget)?;
        if steps == 0 {
            out.warnings.push(format!("{f}: one step exceeds the budget of {}; skipped", cfg.budget));
            continue;
        }
        let depth = registry.depth(model.kind, f, steps)?;
        plan.push((f, steps, depth));
    }
    if plan.is_empty() {
        out.warnings.push(format!("no formula fits the budget of {}; no rows emitted", cfg.budget));
        return Ok(out);
    }

    let times = cfg.time.points();
    let alphas = cfg.alpha.points();
    let per_alpha = parallel_map(alphas, cfg.workers, |alpha| -> Result<Vec<LandscapeRow>, BenchError> {
        let eval = PointEvaluator::new(build_model(&model.with_alpha(alpha))?, &opts)?;
        let runners = plan.iter().map(|(f, _, _)| eval.runner(*f)).collect::<Result<Vec<_>, _>>()?;
        let mut rows = Vec::new();
        for &t in &times {
            let reference = eval.reference(t)?;
            let start = rows.len();
            for ((f, steps, depth), runner) in plan.iter().zip(&runners) {
                rows.push(LandscapeRow {
                    model: model.kind,
                    engine: eval.engine,
                    seed: cfg.rng_seed,
                    alpha,
                    t,
                    budget: cfg.budget,
                    formula: *f,
                    steps: *steps,
                    two_qubit_depth: depth.two_qubit,
                    cnot_depth: depth.cnot,
                    metric: cfg.metric,
                    error: runner.error(&reference, t, *steps)?,
                    is_best: false,
                });
            }
            mark_best(&mut rows[start..]);
        }
        Ok(rows)
    });
    for rows in per_alpha {
        out.rows.extend(rows?);
    }
    Ok(out)
}

/// Lowest error wins; ties go to the shallower circuit, then the name.
fn mark_best(rows: &mut [LandscapeRow]) {
    let best = rows
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            a.error
                .error
                .total_cmp(&b.error.error)
                .then(a.two_qubit_depth.cmp(&b.two_qubit_depth))
                .then(a.formula.name().cmp(b.formula.name()))
        })
        .map(|(i, _)| i);
    if let Some(i) = best {
        rows[i].is_best = true;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinSteps {
    pub steps: u64,
    pub error: f64,
}

/// Smallest `n <= n_max` with `error(n) <= epsilon`: doubling to bracket,
/// bisection inside the bracket, and a direct check at `n` and `n - 1`.
pub fn min_steps_by<F>(epsilon: f64, n_max: u64, mut error: F) -> Result<MinSteps, BenchError>
where
    F: FnMut(u64) -> Result<f64, BenchError>,
{
    if !(epsilon > 0.0) {
        return Err(BenchError::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    if n_max == 0 {
        return Err(BenchError::Config("n_max must be at least 1".into()));
    }
    let mut cache: BTreeMap<u64, f64> = BTreeMap::new();
    let mut eval = |n: u64| -> Result<f64, BenchError> {
        if let Some(e) = cache.get(&n) {
            return Ok(*e);
        }
        let e = error(n)?;
        cache.insert(n, e);
        Ok(e)
    };
    let first = eval(1)?;
    if first <= epsilon {
        return Ok(MinSteps { steps: 1, error: first });
    }
    let mut lo = 1;
    let mut hi;
    loop {
        if lo >= n_max {
            return Err(BenchError::NotFound { n_max, error: eval(n_max)? });
        }
        hi = (lo * 2).min(n_max);
        if eval(hi)? <= epsilon {
            break;
        }
        lo = hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if eval(mid)? <= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let at = eval(hi)?;
    let below = eval(hi - 1)?;
    if at > epsilon || (hi > 1 && below <= epsilon) {
        return Err(BenchError::Fit(format!("bisection bracket failed verification at n = {hi}")));
    }
    Ok(MinSteps { steps: hi, error: at })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinStepsQuery {
    pub model: ModelSpec,
    pub formula: FormulaKind,
    pub alpha: f64,
    pub t: f64,
    pub epsilon: f64,
    pub n_max: u64,
}

pub fn min_steps(query: &MinStepsQuery, opts: &EngineOptions) -> Result<MinSteps, BenchError> {
    let eval = PointEvaluator::new(build_model(&query.model.with_alpha(query.alpha))?, opts)?;
    let reference = eval.reference(query.t)?;
    let runner = eval.runner(query.formula)?;
    min_steps_by(query.epsilon, query.n_max, |n| Ok(runner.error(&reference, query.t, n)?.error))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub model: ModelKind,
    pub engine: ResolvedEngine,
    pub seed: u64,
    pub size: usize,
    pub alpha: f64,
    pub t: f64,
    pub epsilon: f64,
    pub formula: FormulaKind,
    /// `None` when `n_max` steps do not reach `epsilon`.
    pub steps: Option<u64>,
    pub two_qubit_depth: Option<u64>,
    pub cnot_depth: Option<u64>,
    /// Two-qubit depth added per step.
    pub depth_step: u64,
    pub metric: Metric,
    pub error: f64,
}

/// Minimal step counts over the sizes in `cfg.sizes` with `T = c L`.
pub fn scaling(cfg: &SweepConfig) -> Result<Vec<ScalingRow>, BenchError> {
    cfg.validate()?;
    if cfg.sizes.is_empty() {
        return Err(BenchError::Config("scaling needs a nonempty `sizes` list".into()));
    }
    let opts = EngineOptions::from_config(cfg)?;
    let registry = DepthRegistry::bundled();
    let model = cfg.seeded_model();
    let formulas = canonical_formulas(&cfg.formulas);
    for f in &formulas {
        registry.formula(model.kind, *f)?;
    }
    let c = cfg.time_per_size.unwrap_or(1.0);
    let mut tasks = Vec::new();
    for &size in &cfg.sizes {
        for alpha in cfg.alpha.points() {
            tasks.push((size, alpha));
        }
    }
    let results = parallel_map(tasks, cfg.workers, |(size, alpha)| -> Result<Vec<ScalingRow>, BenchError> {
        let spec = model.with_size(size);
        spec.validate()?;
        let t = c * size as f64;
        let eval = PointEvaluator::new(build_model(&spec.with_alpha(alpha))?, &opts)?;
        let reference = eval.reference(t)?;
        let mut rows = Vec::new();
        for &f in &formulas {
            let runner = eval.runner(f)?;
            let found = min_steps_by(cfg.epsilon, cfg.n_max, |n| Ok(runner.error(&reference, t, n)?.error));
            let (steps, error) = match found {
                Ok(m) => (Some(m.steps), m.error),
                Err(BenchError::NotFound { error, .. }) => (None, error),
                Err(e) => return Err(e),
            };
            let depth = steps.map(|n| registry.depth(model.kind, f, n)).transpose()?;
            rows.push(ScalingRow {
                model: model.kind,
                engine: eval.engine,
                seed: cfg.rng_seed,
                size,
                alpha,
                t,
                epsilon: cfg.epsilon,
                formula: f,
                steps,
                two_qubit_depth: depth.map(|d| d.two_qubit),
                cnot_depth: depth.map(|d| d.cnot),
                depth_step: registry.formula(model.kind, f)?.two_qubit.slope,
                metric: cfg.metric,
                error,
            });
        }
        Ok(rows)
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Two-qubit depth budget of each model's published step-count table.
pub fn table_budget(model: ModelKind) -> u64 {
    match model {
        ModelKind::Tfim1d => 31,
        ModelKind::Tfim2d => 105,
        ModelKind::Heisenberg1d => 31,
        ModelKind::FermiHubbard1d => 61,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthTableRow {
    pub model: ModelKind,
    pub formula: FormulaKind,
    pub two_qubit: String,
    pub cnot: String,
    pub budget: u64,
    /// 0 when one step already exceeds the budget.
    pub steps: u64,
}

fn affine_label(a: crate::depth::Affine) -> String {
    if a.offset == 0 {
        format!("{}N", a.slope)
    } else {
        format!("{}N+{}", a.slope, a.offset)
    }
}

/// Step counts within each model's table budget (or `budget` if given).
pub fn depth_tables(registry: &DepthRegistry, budget: Option<u64>) -> Result<Vec<DepthTableRow>, BenchError> {
    let mut rows = Vec::new();
    for model in [ModelKind::Tfim1d, ModelKind::Tfim2d, ModelKind::Heisenberg1d, ModelKind::FermiHubbard1d] {
        let b = budget.unwrap_or(table_budget(model));
        for formula in registry.formulas_for(model) {
            let f = registry.formula(model, formula)?;
            rows.push(DepthTableRow {
                model,
                formula,
                two_qubit: affine_label(f.two_qubit),
                cnot: affine_label(f.cnot),
                budget: b,
                steps: registry.steps_for_budget(model, formula, b)?,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub alpha: f64,
    pub t: f64,
    /// Commutator bound on one THRIFT-1 step of length `t`.
    pub thrift1_step: Option<f64>,
    /// Truncated-series bounds on the Magnus remainder after orders 1 and 2.
    pub magnus_remainder: [Option<f64>; 2],
}

pub fn bounds(cfg: &SweepConfig) -> Result<Vec<BoundsRow>, BenchError> {
    cfg.validate()?;
    let model = cfg.seeded_model();
    let series = convergence_series(MAX_SERIES_ORDER)?;
    let mut rows = Vec::new();
    for alpha in cfg.alpha.points() {
        let part = build_model(&model.with_alpha(alpha))?;
        let h1 = part.h1();
        let h1_norm = spectral_norm(&h1, cfg.dense_cap.min(DEFAULT_DENSE_CAP)).unwrap_or_else(|_| h1.one_norm());
        for t in cfg.time.points() {
            let thrift1_step = if part.n_qubits <= DEFAULT_DENSE_CAP { Some(thrift_error_bound(&part, t, 24)?) } else { None };
            let magnus = |k: usize| magnus_remainder_bound(k, alpha, t, t * h1_norm, &series).ok().map(|b| b.value);
            rows.push(BoundsRow { alpha, t, thrift1_step, magnus_remainder: [magnus(1), magnus(2)] });
        }
    }
    Ok(rows)
}
