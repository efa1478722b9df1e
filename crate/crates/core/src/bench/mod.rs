//! Sweep engine behind the `thrift-bench` CLI: best-formula landscapes,
//! minimal step counts to an error threshold, power-law fits and CSV output.

mod config;
mod csv;
mod fit;
mod sweep;

use thiserror::Error;

pub use config::{Engine, Grid, LogRange, SweepConfig};
pub use csv::{fmt_float, landscape_csv, scaling_csv, CsvDocument};
pub use fit::{depth_weight, parse_scaling_csv, powerlaw_fit, FitPoint, FitResult};
pub use sweep::{
    bounds, depth_tables, landscape, min_steps, min_steps_by, scaling, table_budget, BoundsRow, DepthTableRow, Landscape,
    LandscapeRow, MinSteps, MinStepsQuery, ScalingRow,
};

use crate::depth::DepthError;
use crate::exact::{error_by_metric, DenseUnitary, ExactError, ExactPropagator, Metric};
use crate::flo::{flo_error_report, flo_evaluate_factors, flo_evaluate_schedule, flo_exact, FloError, GaussianUnitary};
use crate::formulas::{make_schedule, FormulaError, FormulaKind, Omega8, StepEvaluator};
use crate::magnus::{evaluate_factors_dense, magnus_thrift_factors, MagnusError, SplitMode};
use crate::models::{ModelError, ModelKind, PartitionedHamiltonian};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("capability error: {0}")]
    Capability(String),
    #[error("no step count up to {n_max} reaches the threshold (error {error:e} at n_max)")]
    NotFound { n_max: u64, error: f64 },
    #[error("fit error: {0}")]
    Fit(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Magnus(#[from] MagnusError),
    #[error(transparent)]
    Flo(#[from] FloError),
    #[error(transparent)]
    Depth(#[from] DepthError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl BenchError {
    /// Process exit code: 2 for configuration problems, 3 for size or
    /// engine capability problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Depth(_) | BenchError::Model(_) => 2,
            BenchError::Capability(_) | BenchError::Exact(ExactError::TooLarge { .. }) => 3,
            BenchError::Formula(FormulaError::Exact(ExactError::TooLarge { .. }))
            | BenchError::Magnus(MagnusError::Exact(ExactError::TooLarge { .. })) => 3,
            BenchError::Formula(FormulaError::MissingOmegaTable | FormulaError::BadOmegaTable(_) | FormulaError::OmegaIo { .. }) => 2,
            _ => 1,
        }
    }
}

/// Engine after resolving `auto` for a concrete model size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolvedEngine {
    Dense,
    Flo,
}

impl ResolvedEngine {
    pub fn name(self) -> &'static str {
        match self {
            ResolvedEngine::Dense => "dense",
            ResolvedEngine::Flo => "flo",
        }
    }
}

pub fn resolve_engine(
    engine: Engine,
    model: ModelKind,
    n_qubits: usize,
    metric: Metric,
    dense_cap: usize,
) -> Result<ResolvedEngine, BenchError> {
    let flo_ok = model == ModelKind::Tfim1d && metric == Metric::WorstCase;
    match engine {
        Engine::Dense if n_qubits <= dense_cap => Ok(ResolvedEngine::Dense),
        Engine::Dense => Err(BenchError::Capability(format!("{n_qubits} qubits exceed the dense cap of {dense_cap}"))),
        Engine::Flo if flo_ok => Ok(ResolvedEngine::Flo),
        Engine::Flo => Err(BenchError::Capability(format!(
            "the free-fermion engine handles only tfim_1d with the worst_case metric, not {model} with {}",
            metric.name()
        ))),
        Engine::Auto if n_qubits <= dense_cap => Ok(ResolvedEngine::Dense),
        Engine::Auto if flo_ok => Ok(ResolvedEngine::Flo),
        Engine::Auto => Err(BenchError::Capability(format!(
            "{n_qubits} qubits exceed the dense cap of {dense_cap} and {model} is not free-fermion reducible"
        ))),
    }
}

/// Settings shared by every evaluation in a sweep.
#[derive(Debug, Clone)]
pub struct EngineOptions {
    pub engine: Engine,
    pub metric: Metric,
    pub dense_cap: usize,
    pub magnus_split: Option<SplitMode>,
    pub omega8: Omega8,
}

impl EngineOptions {
    pub fn from_config(cfg: &SweepConfig) -> Result<Self, BenchError> {
        let omega8 = match &cfg.omega8_path {
            Some(p) => Omega8::from_file(p)?,
            None => Omega8::bundled(),
        };
        Ok(EngineOptions { engine: cfg.engine, metric: cfg.metric, dense_cap: cfg.dense_cap, magnus_split: cfg.magnus_split, omega8 })
    }
}

/// Exact evolution used as the reference at one time.
#[derive(Debug, Clone)]
pub enum Reference {
    Dense(DenseUnitary),
    Flo(GaussianUnitary),
}

/// Error of one approximation. `error_max_sign` differs from `error` only on
/// the free-fermion engine, where the global sign is not resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorValue {
    pub error: f64,
    pub error_max_sign: f64,
}

/// Evaluates formula errors for one model instance (fixed alpha).
pub struct PointEvaluator {
    pub part: PartitionedHamiltonian,
    pub engine: ResolvedEngine,
    opts: EngineOptions,
    propagator: Option<ExactPropagator>,
}

impl PointEvaluator {
    pub fn new(part: PartitionedHamiltonian, opts: &EngineOptions) -> Result<Self, BenchError> {
        let engine = resolve_engine(opts.engine, part.kind, part.n_qubits, opts.metric, opts.dense_cap)?;
        let propagator = match engine {
            ResolvedEngine::Dense => Some(ExactPropagator::new(&part.full, opts.dense_cap)?),
            ResolvedEngine::Flo => None,
        };
        Ok(PointEvaluator { part, engine, opts: opts.clone(), propagator })
    }

    pub fn reference(&self, t: f64) -> Result<Reference, BenchError> {
        Ok(match &self.propagator {
            Some(p) => Reference::Dense(p.at(t)),
            None => Reference::Flo(flo_exact(&self.part.full, t)?),
        })
    }

    fn split_for(&self, kind: FormulaKind) -> SplitMode {
        self.opts.magnus_split.unwrap_or(SplitMode::matching(kind.order()))
    }

    /// Compiled approximation for one formula, reusable across step counts.
    pub fn runner(&self, kind: FormulaKind) -> Result<FormulaRunner<'_>, BenchError> {
        if kind.is_magnus() {
            return Ok(FormulaRunner { eval: self, kind, compiled: Compiled::Magnus(self.split_for(kind)) });
        }
        let schedule = make_schedule(kind, &self.part, Some(&self.opts.omega8))?;
        let compiled = match self.engine {
            ResolvedEngine::Dense => Compiled::Dense(StepEvaluator::new(&schedule, self.opts.dense_cap)?),
            ResolvedEngine::Flo => Compiled::Flo(schedule),
        };
        Ok(FormulaRunner { eval: self, kind, compiled })
    }

    pub fn error(&self, reference: &Reference, kind: FormulaKind, t: f64, n: u64) -> Result<ErrorValue, BenchError> {
        self.runner(kind)?.error(reference, t, n)
    }
}

enum Compiled {
    Dense(StepEvaluator),
    Flo(crate::formulas::Schedule),
    Magnus(SplitMode),
}

pub struct FormulaRunner<'a> {
    eval: &'a PointEvaluator,
    kind: FormulaKind,
    compiled: Compiled,
}

impl FormulaRunner<'_> {
    pub fn error(&self, reference: &Reference, t: f64, n: u64) -> Result<ErrorValue, BenchError> {
        let part = &self.eval.part;
        let metric = self.eval.opts.metric;
        let dense_error = |u: &DenseUnitary, v: &DenseUnitary| -> Result<ErrorValue, BenchError> {
            let e = error_by_metric(metric, u, v)?;
            Ok(ErrorValue { error: e, error_max_sign: e })
        };
        let flo_error = |u: &GaussianUnitary, v: &GaussianUnitary| -> Result<ErrorValue, BenchError> {
            let r = flo_error_report(u, v)?;
            Ok(ErrorValue { error: r.sign_minimized, error_max_sign: r.pessimistic })
        };
        match (&self.compiled, reference) {
            (Compiled::Dense(step), Reference::Dense(u)) => {
                if n == 0 {
                    return Err(FormulaError::ZeroSteps.into());
                }
                dense_error(u, &step.evolve(t, n))
            }
            (Compiled::Flo(s), Reference::Flo(u)) => flo_error(u, &flo_evaluate_schedule(s, t, n)?),
            (Compiled::Magnus(split), reference) => {
                let factors = magnus_thrift_factors(part, 0.0, t, n, self.kind.order(), *split)?;
                match reference {
                    Reference::Dense(u) => dense_error(u, &evaluate_factors_dense(&factors, part.n_qubits, self.eval.opts.dense_cap)?),
                    Reference::Flo(u) => flo_error(u, &flo_evaluate_factors(&factors, part.n_qubits)?),
                }
            }
            _ => Err(BenchError::Capability("reference and formula engines differ".into())),
        }
    }
}

/// Maps `f` over `items` in parallel (when enabled), keeping input order.
pub(crate) fn parallel_map<T, R, F>(items: Vec<T>, workers: Option<usize>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || items.into_par_iter().map(&f).collect();
        match workers.and_then(|w| rayon::ThreadPoolBuilder::new().num_threads(w).build().ok()) {
            Some(pool) => pool.install(run),
            None => run(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        items.into_iter().map(f).collect()
    }
}
