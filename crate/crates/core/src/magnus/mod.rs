//! Interaction-picture Magnus expansion and Magnus-THRIFT evolution.
//!
//! For a diagonal `H0`, `H1(t) = e^{itH0} H1 e^{-itH0} = sum_q f_q(t) O_q`
//! with trigonometric `f_q`, so the first two Magnus terms over a slice
//! have closed forms.

mod convergence;
mod trig;

use num_complex::Complex64;
use thiserror::Error;

use crate::exact::{CompiledGenerator, DenseUnitary, ExactError, DEFAULT_DENSE_CAP};
use crate::models::PartitionedHamiltonian;
use crate::pauli::{group_layers, pauli_mul_unchecked, PauliError, PauliString, PauliSum};

pub use convergence::{
    bernoulli_numbers, convergence_series, g_inverse_integral, g_value, magnus_remainder_bound, ConvergenceSeries,
    RemainderBound, MAX_SERIES_ORDER, TAIL_DISCLAIMER,
};
pub use trig::{phi1, signed_double_integral, TrigPoly, FREQ_TOL};

#[derive(Debug, Error)]
pub enum MagnusError {
    #[error("H0 must be diagonal (Z-type strings only); found {0}")]
    NonDiagonalH0(String),
    #[error("Magnus order {0} unsupported (expected 1 or 2)")]
    UnsupportedOrder(u32),
    #[error("series order {0} outside 1..=20")]
    SeriesOrder(usize),
    #[error("argument {argument} outside the convergence region (< {limit})")]
    OutsideConvergence { argument: f64, limit: f64 },
    #[error("slice count must be positive")]
    ZeroSlices,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// `H1(t) = sum_q coefficient_q(t) O_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionHamiltonian {
    pub n_qubits: usize,
    pub entries: Vec<(PauliString, TrigPoly)>,
}

impl InteractionHamiltonian {
    /// `sum_q f_q(t) O_q` as a Pauli sum.
    pub fn at(&self, t: f64) -> PauliSum {
        let mut s = PauliSum::zero(self.n_qubits);
        for (p, f) in &self.entries {
            s.add_term(*p, f.eval(t)).expect("same register");
        }
        s
    }
}

/// `e^{itH0} H e^{-itH0}` for diagonal `H0`, built one `H0` term at a time:
/// an anticommuting `S` sends `P` to `cos(2ct) P + i sin(2ct) S P`.
pub fn conjugate_by_diagonal(h0: &PauliSum, h: &PauliSum) -> Result<InteractionHamiltonian, MagnusError> {
    if let Some((p, _)) = h0.terms().find(|(p, _)| !p.is_diagonal()) {
        return Err(MagnusError::NonDiagonalH0(p.to_string()));
    }
    let mut current: Vec<(PauliString, TrigPoly)> = h.terms().map(|(p, c)| (*p, TrigPoly::constant(*c))).collect();
    for (s, c) in h0.terms() {
        if s.is_identity() {
            continue;
        }
        let w = 2.0 * c.re;
        let mut next: std::collections::BTreeMap<PauliString, TrigPoly> = std::collections::BTreeMap::new();
        for (p, f) in current {
            if s.commutes_with(&p) {
                let e = next.entry(p).or_default();
                *e = e.add(&f);
                continue;
            }
            let (ph, sp) = pauli_mul_unchecked(s, &p);
            let coeff = Complex64::new(0.0, 1.0) * ph.to_complex();
            let cos_part = f.mul(&TrigPoly::cos(w, Complex64::new(1.0, 0.0)));
            let sin_part = f.mul(&TrigPoly::sin(w, coeff));
            let e = next.entry(p).or_default();
            *e = e.add(&cos_part);
            let e = next.entry(sp).or_default();
            *e = e.add(&sin_part);
        }
        current = next.into_iter().filter(|(_, f)| !f.is_zero()).collect();
    }
    Ok(InteractionHamiltonian { n_qubits: h.n_qubits(), entries: current })
}

/// Interaction picture of the (unit-strength) perturbation `sum_g H1^g`.
pub fn interaction_picture(part: &PartitionedHamiltonian) -> Result<InteractionHamiltonian, MagnusError> {
    conjugate_by_diagonal(&part.h0, &part.h1())
}

/// `Omega = -i alpha dt * effective_hamiltonian` over `[t0, t0 + dt]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnusTerm {
    pub order: u32,
    pub t0: f64,
    pub dt: f64,
    pub alpha: f64,
    /// `sum_q A_q O_q`.
    pub first: PauliSum,
    /// `sum_{q>p} B_qp [O_q, O_p]` (empty at first order).
    pub second: PauliSum,
    pub a_coeffs: Vec<Complex64>,
    pub b_coeffs: Vec<(usize, usize, Complex64)>,
}

impl MagnusTerm {
    pub fn effective_hamiltonian(&self) -> PauliSum {
        self.first.add(&self.second).expect("same register")
    }
}

/// First (`A_q = (1/dt) ∫ f_q`) and optionally second order
/// (`B_qp = -(i alpha / (2 dt)) ∬ f_q(t1) f_p(t2) sign(t1 - t2)`) terms.
pub fn magnus_term(ih: &InteractionHamiltonian, alpha: f64, t0: f64, dt: f64, order: u32) -> Result<MagnusTerm, MagnusError> {
    if order == 0 || order > 2 {
        return Err(MagnusError::UnsupportedOrder(order));
    }
    let n = ih.n_qubits;
    let mut first = PauliSum::zero(n);
    let a_coeffs: Vec<Complex64> = ih.entries.iter().map(|(_, f)| f.integrate(t0, t0 + dt) / dt).collect();
    for ((p, _), a) in ih.entries.iter().zip(&a_coeffs) {
        first.add_term(*p, *a)?;
    }
    let mut second = PauliSum::zero(n);
    let mut b_coeffs = Vec::new();
    if order == 2 {
        let prefactor = Complex64::new(0.0, -alpha / (2.0 * dt));
        for q in 0..ih.entries.len() {
            let (oq, fq) = &ih.entries[q];
            for p in 0..q {
                let (op, fp) = &ih.entries[p];
                if oq.commutes_with(op) {
                    continue;
                }
                let b = prefactor * signed_double_integral(fq, fp, t0, dt);
                b_coeffs.push((q, p, b));
                let (ph, prod) = pauli_mul_unchecked(oq, op);
                second.add_term(prod, 2.0 * ph.to_complex() * b)?;
            }
        }
    }
    Ok(MagnusTerm { order, t0, dt, alpha, first, second, a_coeffs, b_coeffs })
}

/// How each slice exponential `exp(-i alpha dt H_eff)` is realised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// One exponential of the whole effective Hamiltonian.
    Exact,
    /// Product over the layers in order.
    FirstOrder,
    /// Symmetric (Strang) product over the layers.
    SecondOrder,
}

impl SplitMode {
    /// The split whose error matches the Magnus order.
    pub fn matching(order: u32) -> Self {
        if order >= 2 {
            SplitMode::SecondOrder
        } else {
            SplitMode::FirstOrder
        }
    }
}

/// One factor `exp(-i duration * generator)` of a Magnus-THRIFT circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedFactor {
    pub generator: PauliSum,
    pub duration: f64,
}

/// Layers of one slice: the first-order part on 2-qubit blocks, then the
/// commutator part on 3-qubit blocks.
fn slice_layers(term: &MagnusTerm, alpha: f64) -> Result<Vec<PauliSum>, MagnusError> {
    let mut layers = Vec::new();
    for (part, block) in [(&term.first, 2u32), (&term.second, 3u32)] {
        if part.is_empty() {
            continue;
        }
        let hermitian = hermitian_part(part).scale_real(alpha);
        let layering = group_layers(&hermitian, block)?;
        layers.extend(layering.split(&hermitian));
    }
    Ok(layers)
}

/// Drops the round-off imaginary parts of an effective Hamiltonian.
fn hermitian_part(h: &PauliSum) -> PauliSum {
    PauliSum::from_terms(h.n_qubits(), h.terms().map(|(p, c)| (*p, Complex64::new(c.re, 0.0)))).expect("same register")
}

/// Operator-ordered factor list (leftmost first) for
/// `e^{-i t_end H0} S_n ... S_1 e^{i t_start H0}` with slices
/// `S_k ~ T exp(-i alpha ∫ H1(tau) dtau)` over `n` equal sub-intervals.
pub fn magnus_thrift_factors(
    part: &PartitionedHamiltonian,
    t_start: f64,
    t_end: f64,
    n: u64,
    order: u32,
    split: SplitMode,
) -> Result<Vec<TimedFactor>, MagnusError> {
    if n == 0 {
        return Err(MagnusError::ZeroSlices);
    }
    if order == 0 || order > 2 {
        return Err(MagnusError::UnsupportedOrder(order));
    }
    let ih = interaction_picture(part)?;
    let dt = (t_end - t_start) / n as f64;
    let mut factors = vec![TimedFactor { generator: part.h0.clone(), duration: t_end }];
    for k in (0..n).rev() {
        let t0 = t_start + k as f64 * dt;
        let term = magnus_term(&ih, part.alpha, t0, dt, order)?;
        match split {
            SplitMode::Exact => {
                let eff = hermitian_part(&term.effective_hamiltonian()).scale_real(part.alpha);
                factors.push(TimedFactor { generator: eff, duration: dt });
            }
            SplitMode::FirstOrder => {
                for layer in slice_layers(&term, part.alpha)? {
                    factors.push(TimedFactor { generator: layer, duration: dt });
                }
            }
            SplitMode::SecondOrder => {
                let layers = slice_layers(&term, part.alpha)?;
                let m = layers.len();
                for (i, layer) in layers.iter().enumerate() {
                    let d = if i + 1 == m { dt } else { dt / 2.0 };
                    factors.push(TimedFactor { generator: layer.clone(), duration: d });
                }
                for layer in layers.iter().rev().skip(1) {
                    factors.push(TimedFactor { generator: layer.clone(), duration: dt / 2.0 });
                }
            }
        }
    }
    factors.push(TimedFactor { generator: part.h0.clone(), duration: -t_start });
    Ok(factors)
}

/// Dense product of a factor list (leftmost factor first).
pub fn evaluate_factors_dense(factors: &[TimedFactor], n_qubits: usize, dense_cap: usize) -> Result<DenseUnitary, MagnusError> {
    let mut u = DenseUnitary::identity(n_qubits);
    for f in factors.iter().rev() {
        if f.duration == 0.0 || f.generator.is_empty() {
            continue;
        }
        CompiledGenerator::new(&f.generator, dense_cap)?.apply_left(u.matrix_mut(), f.duration);
    }
    Ok(u)
}

/// Magnus-THRIFT approximation of `e^{-iTH}` with `n` slices.
pub fn magnus_thrift_evolve(
    part: &PartitionedHamiltonian,
    t_total: f64,
    n: u64,
    order: u32,
    split: SplitMode,
) -> Result<DenseUnitary, MagnusError> {
    magnus_thrift_window(part, 0.0, t_total, n, order, split)
}

/// Magnus-THRIFT over `[t_start, t_end]`, i.e. an approximation of
/// `e^{-i t_end H0} T exp(-i alpha ∫ H1) e^{i t_start H0}`. Windows chain:
/// `window(b, c) * window(a, b)` equals `window(a, c)` with the slices
/// concatenated.
pub fn magnus_thrift_window(
    part: &PartitionedHamiltonian,
    t_start: f64,
    t_end: f64,
    n: u64,
    order: u32,
    split: SplitMode,
) -> Result<DenseUnitary, MagnusError> {
    let factors = magnus_thrift_factors(part, t_start, t_end, n, order, split)?;
    evaluate_factors_dense(&factors, part.n_qubits, DEFAULT_DENSE_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;

    #[test]
    fn non_diagonal_h0_rejected() {
        let h0 = PauliSum::from_real_terms(1, [(PauliString::single(1, 0, Pauli::X).unwrap(), 1.0)]).unwrap();
        let h = PauliSum::from_real_terms(1, [(PauliString::single(1, 0, Pauli::Z).unwrap(), 1.0)]).unwrap();
        assert!(matches!(conjugate_by_diagonal(&h0, &h), Err(MagnusError::NonDiagonalH0(_))));
    }

    #[test]
    fn order_three_rejected() {
        let ih = InteractionHamiltonian { n_qubits: 1, entries: vec![] };
        assert!(matches!(magnus_term(&ih, 1.0, 0.0, 1.0, 3), Err(MagnusError::UnsupportedOrder(3))));
    }
}
