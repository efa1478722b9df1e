use num_complex::Complex64;

use super::{Factor, FormulaError, Schedule};
use crate::exact::{expm_hermitian_capped, spectral_error, CompiledGenerator, DenseUnitary, ExactError, DEFAULT_DENSE_CAP};
use crate::linalg::{self, CMatrix, HermitianSpectrum};
use crate::models::PartitionedHamiltonian;
use crate::pauli::PauliSum;
use crate::quad::GaussLegendre;

/// A schedule with every generator pre-factored, ready for repeated steps.
#[derive(Debug, Clone)]
pub struct StepEvaluator {
    n_qubits: usize,
    compiled: Vec<CompiledGenerator>,
    factors: Vec<Factor>,
}

impl StepEvaluator {
    pub fn new(schedule: &Schedule, dense_cap: usize) -> Result<Self, FormulaError> {
        let n_qubits = schedule.generators.first().map(|g| g.sum.n_qubits()).unwrap_or(1);
        let compiled =
            schedule.generators.iter().map(|g| CompiledGenerator::new(&g.sum, dense_cap)).collect::<Result<Vec<_>, ExactError>>()?;
        Ok(StepEvaluator { n_qubits, compiled, factors: schedule.factors.clone() })
    }

    /// `m <- step(dt) m`; the rightmost factor is applied first.
    pub fn apply_step(&self, m: &mut CMatrix, dt: f64) {
        for f in self.factors.iter().rev() {
            self.compiled[f.generator].apply_left(m, f.multiplier * dt);
        }
    }

    pub fn step(&self, dt: f64) -> DenseUnitary {
        let mut u = DenseUnitary::identity(self.n_qubits);
        self.apply_step(u.matrix_mut(), dt);
        u
    }

    /// `step(t/n)^n`, by direct application or by repeated squaring,
    /// whichever is estimated cheaper.
    pub fn evolve(&self, t: f64, n: u64) -> DenseUnitary {
        let dim = (1usize << self.n_qubits) as f64;
        let per_step: f64 = self.factors.iter().map(|f| self.compiled[f.generator].relative_cost()).sum();
        let direct = per_step * n as f64;
        let squarings = 2.0 * (n as f64).log2().ceil().max(1.0);
        // the GEMM kernel runs several times faster per multiply than the block loops
        let squaring = per_step + squarings * dim * 0.25;
        let dt = t / n as f64;
        if direct <= squaring {
            let mut u = DenseUnitary::identity(self.n_qubits);
            for _ in 0..n {
                self.apply_step(u.matrix_mut(), dt);
            }
            u
        } else {
            self.step(dt).pow(n)
        }
    }
}

/// `(step(T/N))^N` for a fixed schedule.
pub fn evaluate_schedule(schedule: &Schedule, t: f64, n: u64) -> Result<DenseUnitary, FormulaError> {
    evaluate_schedule_capped(schedule, t, n, DEFAULT_DENSE_CAP)
}

pub fn evaluate_schedule_capped(schedule: &Schedule, t: f64, n: u64, dense_cap: usize) -> Result<DenseUnitary, FormulaError> {
    if n == 0 {
        return Err(FormulaError::ZeroSteps);
    }
    Ok(StepEvaluator::new(schedule, dense_cap)?.evolve(t, n))
}

/// Dense interaction-picture conjugation `e^{isH0} A e^{-isH0}`.
struct Conjugator {
    diag: Option<Vec<f64>>,
    spectrum: Option<HermitianSpectrum>,
}

impl Conjugator {
    fn new(h0: &PauliSum) -> Self {
        if h0.is_diagonal() {
            Conjugator { diag: Some(h0.diagonal()), spectrum: None }
        } else {
            Conjugator { diag: None, spectrum: Some(HermitianSpectrum::new(&h0.to_dense())) }
        }
    }

    fn apply(&self, a: &CMatrix, s: f64) -> CMatrix {
        if let Some(d) = &self.diag {
            CMatrix::from_fn(a.nrows(), a.ncols(), |x, y| a[(x, y)] * Complex64::from_polar(1.0, s * (d[x] - d[y])))
        } else {
            let spec = self.spectrum.as_ref().expect("one of the two paths is set");
            let fwd = spec.evolve(-s);
            linalg::matmul(&linalg::matmul(&fwd, a), &fwd.adjoint())
        }
    }
}

/// Upper bound on a single first-order THRIFT step of length `t`:
/// `alpha^2 ∫_0^t dv ∫_0^v ds sum_{g1<g2} ‖[H1^{g1}(s), H1^{g2}(v)]‖`,
/// integrated with a tensor Gauss-Legendre rule of `points` nodes per axis.
pub fn thrift_error_bound(part: &PartitionedHamiltonian, t: f64, points: usize) -> Result<f64, FormulaError> {
    if points == 0 {
        return Err(FormulaError::NoQuadrature);
    }
    if part.n_qubits > DEFAULT_DENSE_CAP {
        return Err(ExactError::TooLarge { n: part.n_qubits, cap: DEFAULT_DENSE_CAP }.into());
    }
    let gamma = part.gamma();
    if gamma < 2 || t == 0.0 || part.alpha == 0.0 {
        return Ok(0.0);
    }
    let conj = Conjugator::new(&part.h0);
    let dense: Vec<CMatrix> = part.groups.iter().map(|g| g.sum.to_dense()).collect();
    let gl = GaussLegendre::new(points);
    let mut total = 0.0;
    for (v, wv) in gl.mapped(0.0, t) {
        let at_v: Vec<CMatrix> = dense.iter().map(|m| conj.apply(m, v)).collect();
        for (s, ws) in gl.mapped(0.0, v) {
            let at_s: Vec<CMatrix> = dense.iter().map(|m| conj.apply(m, s)).collect();
            let mut integrand = 0.0;
            for g1 in 0..gamma {
                for g2 in g1 + 1..gamma {
                    let ab = linalg::matmul(&at_s[g1], &at_v[g2]);
                    let comm = &ab - ab.adjoint();
                    // [A, B] is anti-Hermitian for Hermitian A, B
                    let herm: CMatrix = comm * Complex64::new(0.0, 1.0);
                    integrand += linalg::hermitian_spectral_norm(&herm);
                }
            }
            total += wv * ws * integrand;
        }
    }
    Ok(part.alpha * part.alpha * total)
}

/// Distance between `e^{i tb H0} e^{-i(tb-ta)(H0+A)} e^{-i ta H0}` and the
/// `n`-slice left-endpoint product approximating the time-ordered
/// exponential of `A(tau) = e^{i tau H0} A e^{-i tau H0}` over `[ta, tb]`.
pub fn verify_time_ordered_identity(h0: &PauliSum, a: &PauliSum, ta: f64, tb: f64, n: u64) -> Result<f64, FormulaError> {
    if n == 0 {
        return Err(FormulaError::ZeroSteps);
    }
    let cap = DEFAULT_DENSE_CAP;
    let total = h0.add(a)?;
    let rhs = expm_hermitian_capped(h0, -tb, cap)?
        .compose(&expm_hermitian_capped(&total, tb - ta, cap)?)?
        .compose(&expm_hermitian_capped(h0, ta, cap)?)?;
    let h0c = CompiledGenerator::new(h0, cap)?;
    let ac = CompiledGenerator::new(a, cap)?;
    let dt = (tb - ta) / n as f64;
    let mut prod = DenseUnitary::identity(h0.n_qubits());
    for k in 0..n {
        let tau = ta + k as f64 * dt;
        // slice k is e^{i tau H0} e^{-i dt A} e^{-i tau H0}; later slices act on the left
        let m = prod.matrix_mut();
        h0c.apply_left(m, tau);
        ac.apply_left(m, dt);
        h0c.apply_left(m, -tau);
    }
    Ok(spectral_error(&rhs, &prod)?)
}
