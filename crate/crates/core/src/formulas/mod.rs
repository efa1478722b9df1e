//! Product formulas compiled to [`Schedule`]s.
//!
//! A schedule lists `(generator, multiplier)` factors in operator order: the
//! first entry is the leftmost factor, so it acts last on a state. A factor
//! with multiplier `m` stands for `exp(-i m dt G)` at step length `dt`.

mod eval;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::ExactError;
use crate::models::PartitionedHamiltonian;
use crate::pauli::{PauliError, PauliSum};

pub use eval::{evaluate_schedule, evaluate_schedule_capped, thrift_error_bound, verify_time_ordered_identity, StepEvaluator};

#[derive(Debug, Error)]
pub enum FormulaError {
    #[error("unsupported order {0} (expected one of {1})")]
    UnsupportedOrder(u32, &'static str),
    #[error("8th-order formulas need a composition table; none was supplied")]
    MissingOmegaTable,
    #[error("invalid composition table: {0}")]
    BadOmegaTable(String),
    #[error("could not read composition table {path}: {source}")]
    OmegaIo { path: String, source: std::io::Error },
    #[error("partition has no perturbation groups")]
    NoGroups,
    #[error("{0} is not a fixed schedule (time-dependent formula)")]
    NotASchedule(FormulaKind),
    #[error("step count must be positive")]
    ZeroSteps,
    #[error("quadrature needs at least one point")]
    NoQuadrature,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaKind {
    Trotter1,
    Trotter2,
    Trotter4,
    Trotter8Opt,
    OmelyanSmallA4,
    Thrift1,
    Thrift2,
    Thrift4,
    Thrift8Opt,
    MagnusThrift1,
    MagnusThrift2,
}

impl FormulaKind {
    pub const ALL: [FormulaKind; 11] = [
        FormulaKind::Trotter1,
        FormulaKind::Trotter2,
        FormulaKind::Trotter4,
        FormulaKind::Trotter8Opt,
        FormulaKind::Thrift1,
        FormulaKind::Thrift2,
        FormulaKind::Thrift4,
        FormulaKind::Thrift8Opt,
        FormulaKind::MagnusThrift1,
        FormulaKind::MagnusThrift2,
        FormulaKind::OmelyanSmallA4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaKind::Trotter1 => "trotter1",
            FormulaKind::Trotter2 => "trotter2",
            FormulaKind::Trotter4 => "trotter4",
            FormulaKind::Trotter8Opt => "trotter8_opt",
            FormulaKind::OmelyanSmallA4 => "omelyan_small_a4",
            FormulaKind::Thrift1 => "thrift1",
            FormulaKind::Thrift2 => "thrift2",
            FormulaKind::Thrift4 => "thrift4",
            FormulaKind::Thrift8Opt => "thrift8_opt",
            FormulaKind::MagnusThrift1 => "magnus_thrift1",
            FormulaKind::MagnusThrift2 => "magnus_thrift2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Nominal order in the step length.
    pub fn order(self) -> u32 {
        match self {
            FormulaKind::Trotter1 | FormulaKind::Thrift1 | FormulaKind::MagnusThrift1 => 1,
            FormulaKind::Trotter2 | FormulaKind::Thrift2 | FormulaKind::MagnusThrift2 => 2,
            FormulaKind::Trotter4 | FormulaKind::Thrift4 | FormulaKind::OmelyanSmallA4 => 4,
            FormulaKind::Trotter8Opt | FormulaKind::Thrift8Opt => 8,
        }
    }

    pub fn is_magnus(self) -> bool {
        matches!(self, FormulaKind::MagnusThrift1 | FormulaKind::MagnusThrift2)
    }

    pub fn is_thrift_family(self) -> bool {
        matches!(
            self,
            FormulaKind::Thrift1
                | FormulaKind::Thrift2
                | FormulaKind::Thrift4
                | FormulaKind::Thrift8Opt
                | FormulaKind::MagnusThrift1
                | FormulaKind::MagnusThrift2
        )
    }

    pub fn needs_omega8(self) -> bool {
        matches!(self, FormulaKind::Trotter8Opt | FormulaKind::Thrift8Opt)
    }
}

impl std::fmt::Display for FormulaKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Weights `w0..w7` of the 8th-order symmetric composition
/// `S2(w7 t)...S2(w1 t) S2(w0 t) S2(w1 t)...S2(w7 t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Omega8 {
    weights: [f64; 8],
}

const BUNDLED_OMEGA8: &str = include_str!("../../data/omega8.txt");

impl Omega8 {
    /// The table shipped in `data/omega8.txt`.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_OMEGA8).expect("bundled table is valid")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, FormulaError> {
        let p = path.as_ref();
        let text = std::fs::read_to_string(p).map_err(|source| FormulaError::OmegaIo { path: p.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// Accepts 8 values (`w0..w7`) or the 15-value palindrome
    /// (`w7..w1, w0, w1..w7`). `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, FormulaError> {
        let values = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<f64>().map_err(|e| FormulaError::BadOmegaTable(format!("{l:?}: {e}"))))
            .collect::<Result<Vec<f64>, _>>()?;
        let weights: [f64; 8] = match values.len() {
            8 => values.as_slice().try_into().expect("length checked"),
            15 => {
                for i in 0..7 {
                    if (values[i] - values[14 - i]).abs() > 1e-12 * values[i].abs().max(1.0) {
                        return Err(FormulaError::BadOmegaTable(format!("entry {i} and {} differ", 14 - i)));
                    }
                }
                let mut w = [0.0; 8];
                w.copy_from_slice(&values[7..15]);
                w
            }
            n => return Err(FormulaError::BadOmegaTable(format!("expected 8 or 15 values, found {n}"))),
        };
        let total = weights[0] + 2.0 * weights[1..].iter().sum::<f64>();
        if (total - 1.0).abs() > 1e-9 {
            return Err(FormulaError::BadOmegaTable(format!("weights sum to {total}, expected 1")));
        }
        Ok(Omega8 { weights })
    }

    pub fn weights(&self) -> &[f64; 8] {
        &self.weights
    }

    /// The 15 composition weights in operator order.
    pub fn sequence(&self) -> Vec<f64> {
        let w = &self.weights;
        (1..8).rev().map(|j| w[j]).chain(std::iter::once(w[0])).chain((1..8).map(|j| w[j])).collect()
    }
}

/// Fourth-order Suzuki weight `1 / (4 - 4^{1/3})`.
pub fn suzuki_s2() -> f64 {
    1.0 / (4.0 - 4f64.cbrt())
}

/// Omelyan small-A constants `(a1, b1, a2)`; the remaining ones follow.
pub const OMELYAN_A1: f64 = 0.5316386245813512;
pub const OMELYAN_B1: f64 = -0.04375142191737413;
pub const OMELYAN_A2: f64 = -0.3086019704406066;

pub fn omelyan_b2() -> f64 {
    0.5 - OMELYAN_B1
}

pub fn omelyan_a3() -> f64 {
    1.0 - 2.0 * (OMELYAN_A1 + OMELYAN_A2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub label: String,
    pub sum: PauliSum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub generator: usize,
    pub multiplier: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub generators: Vec<Generator>,
    pub factors: Vec<Factor>,
}

impl Schedule {
    pub fn new(generators: Vec<Generator>) -> Self {
        Schedule { generators, factors: Vec::new() }
    }

    pub fn push(&mut self, generator: usize, multiplier: f64) {
        self.factors.push(Factor { generator, multiplier });
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Same factors in reverse operator order, durations kept.
    pub fn reversed(&self) -> Schedule {
        Schedule { generators: self.generators.clone(), factors: self.factors.iter().rev().copied().collect() }
    }

    pub fn scaled(&self, c: f64) -> Schedule {
        Schedule {
            generators: self.generators.clone(),
            factors: self.factors.iter().map(|f| Factor { generator: f.generator, multiplier: f.multiplier * c }).collect(),
        }
    }

    /// `self` followed (to the right) by `other`; both must share generators.
    pub fn then(&self, other: &Schedule) -> Schedule {
        debug_assert_eq!(self.generators.len(), other.generators.len());
        let mut s = self.clone();
        s.factors.extend_from_slice(&other.factors);
        s
    }

    /// Merges neighbouring factors of the same generator and drops
    /// factors whose multiplier vanishes.
    pub fn merged(&self) -> Schedule {
        let mut out: Vec<Factor> = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            match out.last_mut() {
                Some(last) if last.generator == f.generator => last.multiplier += f.multiplier,
                _ => out.push(*f),
            }
            if out.last().is_some_and(|l| l.multiplier.abs() < 1e-15) {
                out.pop();
            }
        }
        Schedule { generators: self.generators.clone(), factors: out }
    }

    /// Total multiplier per generator.
    pub fn totals(&self) -> Vec<f64> {
        let mut t = vec![0.0; self.generators.len()];
        for f in &self.factors {
            t[f.generator] += f.multiplier;
        }
        t
    }

    /// Palindromic composition `prod_j self(w_j t)` in the given order.
    pub fn composed(&self, weights: &[f64]) -> Schedule {
        let mut s = Schedule::new(self.generators.clone());
        for &w in weights {
            s = s.then(&self.scaled(w));
        }
        s.merged()
    }
}

fn check_groups(part: &PartitionedHamiltonian) -> Result<(), FormulaError> {
    if part.groups.is_empty() {
        Err(FormulaError::NoGroups)
    } else {
        Ok(())
    }
}

/// Weights turning a second-order step into the requested order.
fn composition_weights(order: u32, omega8: Option<&Omega8>) -> Result<Vec<f64>, FormulaError> {
    match order {
        2 => Ok(vec![1.0]),
        4 => {
            let s = suzuki_s2();
            Ok(vec![s, s, 1.0 - 4.0 * s, s, s])
        }
        8 => omega8.map(Omega8::sequence).ok_or(FormulaError::MissingOmegaTable),
        _ => Err(FormulaError::UnsupportedOrder(order, "1, 2, 4, 8")),
    }
}

/// Generators `[H0, alpha H1^1, ..., alpha H1^G]`.
fn trotter_generators(part: &PartitionedHamiltonian) -> Vec<Generator> {
    std::iter::once(Generator { label: "H0".into(), sum: part.h0.clone() })
        .chain(part.groups.iter().enumerate().map(|(g, grp)| Generator { label: grp.label.clone(), sum: part.scaled_group(g) }))
        .collect()
}

/// First-order step `h_1 ... h_{K-1} H0 h_K` (generator ids as in
/// [`trotter_generators`]).
fn trotter1(part: &PartitionedHamiltonian) -> Schedule {
    let mut s = Schedule::new(trotter_generators(part));
    let k = part.gamma();
    for g in 1..k {
        s.push(g, 1.0);
    }
    s.push(0, 1.0);
    s.push(k, 1.0);
    s
}

pub fn make_trotter(part: &PartitionedHamiltonian, order: u32, omega8: Option<&Omega8>) -> Result<Schedule, FormulaError> {
    check_groups(part)?;
    let s1 = trotter1(part);
    if order == 1 {
        return Ok(s1);
    }
    let weights = composition_weights(order, omega8)?;
    let s2 = s1.scaled(0.5).then(&s1.scaled(0.5).reversed()).merged();
    Ok(s2.composed(&weights))
}

/// Generators `[H0, H0 + alpha H1^1, ..., H0 + alpha H1^G]`.
fn thrift_generators(part: &PartitionedHamiltonian) -> Vec<Generator> {
    std::iter::once(Generator { label: "H0".into(), sum: part.h0.clone() })
        .chain(
            (0..part.gamma())
                .map(|g| Generator { label: format!("H0+{}", part.groups[g].label), sum: part.thrift_generator(g) }),
        )
        .collect()
}

/// Literal first-order step `e^{-itH0} prod_g (e^{itH0} e^{-it(H0 + alpha H1^g)})`,
/// left unmerged.
fn thrift1_literal(part: &PartitionedHamiltonian) -> Schedule {
    let mut s = Schedule::new(thrift_generators(part));
    s.push(0, 1.0);
    for g in 0..part.gamma() {
        s.push(0, -1.0);
        s.push(g + 1, 1.0);
    }
    s
}

pub fn make_thrift(part: &PartitionedHamiltonian, order: u32, omega8: Option<&Omega8>) -> Result<Schedule, FormulaError> {
    check_groups(part)?;
    let u = thrift1_literal(part);
    if order == 1 {
        return Ok(u.merged());
    }
    let weights = composition_weights(order, omega8)?;
    let half = u.scaled(0.5);
    let s2 = half.then(&half.reversed()).merged();
    Ok(s2.composed(&weights))
}

/// Omelyan's optimised small-A fourth-order formula, generalised to
/// `h_1 = H0, h_2.. = alpha H1^g` by alternating forward and backward sweeps.
pub fn make_omelyan_small_a(part: &PartitionedHamiltonian) -> Result<Schedule, FormulaError> {
    check_groups(part)?;
    let a = [OMELYAN_A1, OMELYAN_A2, omelyan_a3(), OMELYAN_A2];
    let b = [OMELYAN_B1, omelyan_b2(), omelyan_b2(), OMELYAN_B1];
    let lambda = part.gamma() + 1;
    let mut s = Schedule::new(trotter_generators(part));
    let mut d_prev = 0.0;
    for i in 0..4 {
        let c = a[i] - d_prev;
        let d = b[i] - c;
        for k in 0..lambda {
            s.push(k, c);
        }
        for k in (0..lambda).rev() {
            s.push(k, d);
        }
        d_prev = d;
    }
    Ok(s.merged())
}

/// Fixed schedule for every non-Magnus formula.
pub fn make_schedule(kind: FormulaKind, part: &PartitionedHamiltonian, omega8: Option<&Omega8>) -> Result<Schedule, FormulaError> {
    match kind {
        FormulaKind::Trotter1 => make_trotter(part, 1, omega8),
        FormulaKind::Trotter2 => make_trotter(part, 2, omega8),
        FormulaKind::Trotter4 => make_trotter(part, 4, omega8),
        FormulaKind::Trotter8Opt => make_trotter(part, 8, omega8),
        FormulaKind::OmelyanSmallA4 => make_omelyan_small_a(part),
        FormulaKind::Thrift1 => make_thrift(part, 1, omega8),
        FormulaKind::Thrift2 => make_thrift(part, 2, omega8),
        FormulaKind::Thrift4 => make_thrift(part, 4, omega8),
        FormulaKind::Thrift8Opt => make_thrift(part, 8, omega8),
        FormulaKind::MagnusThrift1 | FormulaKind::MagnusThrift2 => Err(FormulaError::NotASchedule(kind)),
    }
}
