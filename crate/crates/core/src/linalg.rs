//! Dense complex linear algebra helpers shared by the oracle paths.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Column-major dense complex matrix; basis index bit `j` is qubit `j`.
pub type CMatrix = DMatrix<Complex64>;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// `a * b` through the blocked complex GEMM kernel.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    let mut out = CMatrix::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return out;
    }
    // SAFETY: Complex64 is repr(C) with layout [f64; 2]; all three buffers are
    // column-major with the strides passed and sized exactly m*k, k*n, m*n.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [0.0, 0.0],
            out.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    out
}

fn to_faer(h: &CMatrix) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(h.nrows(), h.ncols(), |i, j| faer::c64::new(h[(i, j)].re, h[(i, j)].im))
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix. Only the
/// lower triangle is read.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = to_faer(h).self_adjoint_eigen(faer::Side::Lower).expect("Hermitian eigensolver converges");
    let values = (0..n).map(|k| eig.S()[k].re).collect();
    let u = eig.U();
    (values, CMatrix::from_fn(n, n, |i, j| Complex64::new(u[(i, j)].re, u[(i, j)].im)))
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    if h.nrows() == 0 {
        return Vec::new();
    }
    to_faer(h).self_adjoint_eigenvalues(faer::Side::Lower).expect("Hermitian eigensolver converges")
}

/// Eigenvalues (ascending) of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let f = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    f.self_adjoint_eigenvalues(faer::Side::Lower).expect("symmetric eigensolver converges")
}

/// Eigen-decomposition of a Hermitian matrix: `h = V diag(values) V^dag`.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianSpectrum {
    pub fn new(h: &CMatrix) -> Self {
        let (values, vectors) = hermitian_eigen(h);
        HermitianSpectrum { values, vectors }
    }

    /// `exp(-i t h)`.
    pub fn evolve(&self, t: f64) -> CMatrix {
        let phases: Vec<Complex64> = self.values.iter().map(|&e| Complex64::from_polar(1.0, -e * t)).collect();
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        matmul(&scaled, &self.vectors.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Largest eigenvalue magnitude of a Hermitian matrix.
pub fn hermitian_spectral_norm(h: &CMatrix) -> f64 {
    if h.nrows() == 0 {
        return 0.0;
    }
    hermitian_eigenvalues(h).iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Largest entry magnitude.
pub fn max_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc: f64, v| acc.max(v.norm()))
}

/// `max |(u^dag u - I)_{ij}|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let g = matmul(&u.adjoint(), u);
    max_entry(&(g - identity(u.nrows())))
}

/// Multiplies every row `r` of `m` by `phases[r]`, i.e. `m <- diag(phases) m`.
pub fn apply_diag_left(m: &mut CMatrix, phases: &[Complex64]) {
    let rows = m.nrows();
    assert_eq!(rows, phases.len());
    for col in m.as_mut_slice().chunks_mut(rows) {
        for (v, p) in col.iter_mut().zip(phases) {
            *v *= p;
        }
    }
}

/// Positions of basis indices obtained by depositing the bits of `a` into
/// the qubit positions `qubits` (lowest qubit gets bit 0 of `a`).
fn deposit_offsets(qubits: &[usize]) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|a| qubits.iter().enumerate().fold(0usize, |acc, (i, &q)| acc | (((a >> i) & 1) << q)))
        .collect()
}

/// `m <- (u on qubits (x) identity elsewhere) * m`. `u` is indexed with bit
/// `i` corresponding to `qubits[i]`.
pub fn apply_block_left(m: &mut CMatrix, qubits: &[usize], u: &CMatrix) {
    let rows = m.nrows();
    let k = qubits.len();
    let bs = 1usize << k;
    assert_eq!(u.nrows(), bs);
    let offsets = deposit_offsets(qubits);
    let block_mask: usize = qubits.iter().fold(0, |acc, &q| acc | (1 << q));
    let bases: Vec<usize> = (0..rows).filter(|r| r & block_mask == 0).collect();
    let umat: Vec<Complex64> = (0..bs * bs).map(|i| u[(i / bs, i % bs)]).collect();
    let mut buf = vec![C0; bs];
    for col in m.as_mut_slice().chunks_mut(rows) {
        for &base in &bases {
            for (a, slot) in buf.iter_mut().enumerate() {
                *slot = col[base | offsets[a]];
            }
            for a in 0..bs {
                let row = &umat[a * bs..(a + 1) * bs];
                let mut acc = C0;
                for (x, y) in row.iter().zip(&buf) {
                    acc += x * y;
                }
                col[base | offsets[a]] = acc;
            }
        }
    }
}

/// `u^k` by repeated squaring.
pub fn matrix_power(u: &CMatrix, mut k: u64) -> CMatrix {
    let mut result: Option<CMatrix> = None;
    let mut base = u.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => matmul(&r, &base),
            });
        }
        k >>= 1;
        if k > 0 {
            base = matmul(&base, &base);
        }
    }
    result.unwrap_or_else(|| identity(u.nrows()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zgemm_matches_naive() {
        let a = CMatrix::from_fn(5, 3, |i, j| Complex64::new(i as f64 - j as f64, (i * j) as f64 * 0.1));
        let b = CMatrix::from_fn(3, 4, |i, j| Complex64::new((i + j) as f64, -(i as f64)));
        let diff = matmul(&a, &b) - &a * &b;
        assert!(max_entry(&diff) < 1e-12);
    }

    #[test]
    fn block_apply_matches_kron() {
        // 3 qubits, block on qubits {0, 2}
        let u = CMatrix::from_fn(4, 4, |i, j| Complex64::new((i * 4 + j) as f64, (i as f64) - (j as f64)));
        let mut m = identity(8);
        apply_block_left(&mut m, &[0, 2], &u);
        for r in 0..8usize {
            for c in 0..8usize {
                let same_mid = (r >> 1) & 1 == (c >> 1) & 1;
                let expect = if same_mid {
                    let ur = (r & 1) | ((r >> 2) & 1) << 1;
                    let uc = (c & 1) | ((c >> 2) & 1) << 1;
                    u[(ur, uc)]
                } else {
                    C0
                };
                assert_eq!(m[(r, c)], expect);
            }
        }
    }
}
