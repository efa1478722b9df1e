//! Exact dense evolution and the two error metrics.

use std::time::Duration;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, CMatrix, HermitianSpectrum};
use crate::pauli::{merge_supports, PauliError, PauliString, PauliSum};

/// Default largest register evaluated densely.
pub const DEFAULT_DENSE_CAP: usize = 12;

/// Widest connected block exponentiated locally instead of on the full register.
const LOCAL_BLOCK_CAP: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("operator is not Hermitian (max imaginary coefficient {0:e})")]
    NotHermitian(f64),
    #[error("{n} qubits exceeds the dense cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// A unitary on `n_qubits` qubits stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DenseUnitary {
    pub fn identity(n_qubits: usize) -> Self {
        DenseUnitary { n_qubits, matrix: linalg::identity(1 << n_qubits) }
    }

    /// Wraps a matrix; the caller vouches for unitarity.
    pub fn from_matrix(n_qubits: usize, matrix: CMatrix) -> Result<Self, ExactError> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(ExactError::DimMismatch(dim, matrix.nrows()));
        }
        Ok(DenseUnitary { n_qubits, matrix })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn matrix_mut(&mut self) -> &mut CMatrix {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `self * other`.
    pub fn compose(&self, other: &DenseUnitary) -> Result<DenseUnitary, ExactError> {
        check_dims(self, other)?;
        Ok(DenseUnitary { n_qubits: self.n_qubits, matrix: linalg::matmul(&self.matrix, &other.matrix) })
    }

    pub fn adjoint(&self) -> DenseUnitary {
        DenseUnitary { n_qubits: self.n_qubits, matrix: self.matrix.adjoint() }
    }

    pub fn pow(&self, k: u64) -> DenseUnitary {
        DenseUnitary { n_qubits: self.n_qubits, matrix: linalg::matrix_power(&self.matrix, k) }
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.matrix)
    }
}

fn check_dims(u: &DenseUnitary, v: &DenseUnitary) -> Result<(), ExactError> {
    if u.dim() != v.dim() {
        Err(ExactError::DimMismatch(u.dim(), v.dim()))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    WorstCase,
    AvgInfidelity,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::WorstCase => "worst_case",
            Metric::AvgInfidelity => "avg_infidelity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub metric: Metric,
    pub value: f64,
    pub n_qubits: usize,
    pub wall_time: Duration,
}

fn hermitian_check(h: &PauliSum) -> Result<(), ExactError> {
    let worst = h.terms().map(|(_, c)| c.im.abs()).fold(0.0, f64::max);
    if worst > 1e-12 * h.one_norm().max(1.0) {
        return Err(ExactError::NotHermitian(worst));
    }
    Ok(())
}

/// Extracts the bits of `value` at the set positions of `mask`, packed low.
fn extract_bits(value: u128, mask: u128) -> u128 {
    let mut out = 0u128;
    let mut m = mask;
    let mut i = 0;
    while m != 0 {
        let q = m.trailing_zeros();
        out |= ((value >> q) & 1) << i;
        i += 1;
        m &= m - 1;
    }
    out
}

#[derive(Debug, Clone)]
struct LocalBlock {
    qubits: Vec<usize>,
    spectrum: HermitianSpectrum,
}

/// A Hermitian generator pre-factored for repeated `exp(-i t G)` application:
/// an identity shift, a diagonal part, small independent blocks, and (only
/// when a connected block is too wide) a full eigen-decomposition.
#[derive(Debug, Clone)]
pub struct CompiledGenerator {
    n_qubits: usize,
    shift: f64,
    diagonal: Option<Vec<f64>>,
    blocks: Vec<LocalBlock>,
    full: Option<HermitianSpectrum>,
}

impl CompiledGenerator {
    pub fn new(h: &PauliSum, dense_cap: usize) -> Result<Self, ExactError> {
        let n = h.n_qubits();
        if n > dense_cap {
            return Err(ExactError::TooLarge { n, cap: dense_cap });
        }
        hermitian_check(h)?;
        let mut shift = 0.0;
        let mut rest = PauliSum::zero(n);
        for (p, c) in h.terms() {
            if p.is_identity() {
                shift += c.re;
            } else {
                rest.add_term(*p, Complex64::new(c.re, 0.0))?;
            }
        }
        let components = merge_supports(rest.terms().map(|(p, _)| p.support()));
        let mut diag_part = PauliSum::zero(n);
        let mut blocks = Vec::new();
        let mut wide = PauliSum::zero(n);
        for mask in components {
            let members: Vec<(PauliString, Complex64)> =
                rest.terms().filter(|(p, _)| p.support() & mask != 0).map(|(p, c)| (*p, *c)).collect();
            if members.iter().all(|(p, _)| p.is_diagonal()) {
                for (p, c) in members {
                    diag_part.add_term(p, c)?;
                }
            } else if mask.count_ones() <= LOCAL_BLOCK_CAP {
                let k = mask.count_ones() as usize;
                let local = PauliSum::from_terms(
                    k,
                    members.iter().map(|(p, c)| {
                        let lp = PauliString::from_masks(k, extract_bits(p.x_mask(), mask), extract_bits(p.z_mask(), mask))
                            .expect("bits packed into k qubits");
                        (lp, *c)
                    }),
                )?;
                let qubits = (0..n).filter(|q| (mask >> q) & 1 == 1).collect();
                blocks.push(LocalBlock { qubits, spectrum: HermitianSpectrum::new(&local.to_dense()) });
            } else {
                for (p, c) in members {
                    wide.add_term(p, c)?;
                }
            }
        }
        let full = if wide.is_empty() { None } else { Some(HermitianSpectrum::new(&wide.to_dense())) };
        let diagonal = if diag_part.is_empty() { None } else { Some(diag_part.diagonal()) };
        Ok(CompiledGenerator { n_qubits: n, shift, diagonal, blocks, full })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Rough cost of one application to a `dim x dim` matrix, in complex
    /// multiply-adds divided by `dim^2`.
    pub fn relative_cost(&self) -> f64 {
        let dim = (1usize << self.n_qubits) as f64;
        let mut c = if self.diagonal.is_some() { 1.0 } else { 0.0 };
        c += self.blocks.iter().map(|b| (1usize << b.qubits.len()) as f64).sum::<f64>();
        if self.full.is_some() {
            c += dim;
        }
        c
    }

    /// `m <- exp(-i t G) m`.
    pub fn apply_left(&self, m: &mut CMatrix, t: f64) {
        if let Some(d) = &self.diagonal {
            let phases: Vec<Complex64> = d.iter().map(|&e| Complex64::from_polar(1.0, -(e + self.shift) * t)).collect();
            linalg::apply_diag_left(m, &phases);
        } else if self.shift != 0.0 {
            let ph = Complex64::from_polar(1.0, -self.shift * t);
            m.iter_mut().for_each(|v| *v *= ph);
        }
        for b in &self.blocks {
            linalg::apply_block_left(m, &b.qubits, &b.spectrum.evolve(t));
        }
        if let Some(spec) = &self.full {
            *m = linalg::matmul(&spec.evolve(t), m);
        }
    }

    pub fn unitary(&self, t: f64) -> DenseUnitary {
        let mut u = DenseUnitary::identity(self.n_qubits);
        self.apply_left(&mut u.matrix, t);
        u
    }
}

/// `exp(-i t h)` for a Hermitian Pauli sum.
pub fn expm_hermitian(h: &PauliSum, t: f64) -> Result<DenseUnitary, ExactError> {
    expm_hermitian_capped(h, t, DEFAULT_DENSE_CAP)
}

pub fn expm_hermitian_capped(h: &PauliSum, t: f64, cap: usize) -> Result<DenseUnitary, ExactError> {
    Ok(CompiledGenerator::new(h, cap)?.unitary(t))
}

/// Exact propagator cache: one eigen-decomposition, any number of times.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    n_qubits: usize,
    spectrum: HermitianSpectrum,
}

impl ExactPropagator {
    pub fn new(h: &PauliSum, cap: usize) -> Result<Self, ExactError> {
        if h.n_qubits() > cap {
            return Err(ExactError::TooLarge { n: h.n_qubits(), cap });
        }
        hermitian_check(h)?;
        Ok(ExactPropagator { n_qubits: h.n_qubits(), spectrum: HermitianSpectrum::new(&h.to_dense()) })
    }

    pub fn at(&self, t: f64) -> DenseUnitary {
        DenseUnitary { n_qubits: self.n_qubits, matrix: self.spectrum.evolve(t) }
    }
}

/// `‖u - v‖` (spectral norm). For unitaries this is `max_j |1 - e^{i phi_j}|`
/// over the eigenphases of `u^dag v`, obtained from the eigenvalues of its
/// Hermitian part (cosines) and anti-Hermitian part (sines). When every
/// phase lies inside `(-pi/2, pi/2)` the sines carry full relative precision.
pub fn spectral_error(u: &DenseUnitary, v: &DenseUnitary) -> Result<f64, ExactError> {
    check_dims(u, v)?;
    let m = linalg::matmul(&u.matrix.adjoint(), &v.matrix);
    let mh = m.adjoint();
    let cos_part: CMatrix = (&m + &mh) * Complex64::new(0.5, 0.0);
    let min_cos = linalg::hermitian_eigenvalues(&cos_part).iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if min_cos > 0.1 {
        let sin_part: CMatrix = (&m - &mh) * Complex64::new(0.0, -0.5);
        let max_sin = linalg::hermitian_spectral_norm(&sin_part).min(1.0);
        let phi = max_sin.asin();
        Ok(2.0 * (phi / 2.0).sin())
    } else {
        Ok((2.0 - 2.0 * min_cos.max(-1.0)).max(0.0).sqrt())
    }
}

/// `1 - 2^{-n} sum_x |<x| u_exact^dag v |x>|^2`.
pub fn avg_infidelity(u_exact: &DenseUnitary, v: &DenseUnitary) -> Result<f64, ExactError> {
    check_dims(u_exact, v)?;
    let dim = u_exact.dim();
    let mut acc = 0.0;
    for x in 0..dim {
        let amp: Complex64 = u_exact.matrix.column(x).iter().zip(v.matrix.column(x).iter()).map(|(a, b)| a.conj() * b).sum();
        acc += amp.norm_sqr();
    }
    Ok((1.0 - acc / dim as f64).max(0.0))
}

pub fn error_by_metric(metric: Metric, u_exact: &DenseUnitary, v: &DenseUnitary) -> Result<f64, ExactError> {
    match metric {
        Metric::WorstCase => spectral_error(u_exact, v),
        Metric::AvgInfidelity => avg_infidelity(u_exact, v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extract_bits_packs() {
        assert_eq!(extract_bits(0b1010_0110, 0b1000_0110), 0b111);
        assert_eq!(extract_bits(0b0010_0010, 0b1000_0110), 0b001);
    }

    #[test]
    fn identity_shift_is_global_phase() {
        let h = PauliSum::from_real_terms(2, [(PauliString::identity(2).unwrap(), 0.3)]).unwrap();
        let u = expm_hermitian(&h, 2.0).unwrap();
        let want = Complex64::from_polar(1.0, -0.6);
        assert!((u.matrix()[(3, 3)] - want).norm() < 1e-14);
        assert!(u.matrix()[(0, 1)].norm() < 1e-14);
    }
}
