//! Free-fermion (matchgate) fast path for quadratic spin chains.
//!
//! Majorana operators `g_{2j} = Z_{<j} X_j`, `g_{2j+1} = Z_{<j} Y_j`. A
//! quadratic Hamiltonian `H = (i/4) sum m_ab g_a g_b` generates the rotation
//! `e^{iHt} g_a e^{-iHt} = sum_b R_ab g_b` with `R = exp(t m)`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::formulas::Schedule;
use crate::linalg::{self, HermitianSpectrum};
use crate::magnus::TimedFactor;
use crate::pauli::{pauli_mul_unchecked, PauliError, PauliString, PauliSum};

pub type RMatrix = DMatrix<f64>;

/// Register size up to which eigenphase sign patterns are enumerated.
const ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, Error)]
pub enum FloError {
    #[error("term {0} is not quadratic in Majorana operators")]
    NotQuadratic(String),
    #[error("mode count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("step count must be positive")]
    ZeroSteps,
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Majorana operator `g_k` as a Pauli string.
pub fn majorana(n_qubits: usize, k: usize) -> Result<PauliString, PauliError> {
    let j = k / 2;
    let below = if j == 0 { 0 } else { (1u128 << j) - 1 };
    let bit = 1u128 << j;
    let z = below | if k % 2 == 1 { bit } else { 0 };
    PauliString::from_masks(n_qubits, bit, z)
}

/// The pair `(a, b)`, `a < b`, with `g_a g_b = phase * p`, and that phase.
fn majorana_pair(p: &PauliString) -> Result<(usize, usize, Complex64), FloError> {
    let n = p.n_qubits();
    let not_quadratic = || FloError::NotQuadratic(p.to_string());
    let candidates: Vec<(usize, usize)> = match p.x_mask().count_ones() {
        0 if p.z_mask().count_ones() == 1 => {
            let j = p.z_mask().trailing_zeros() as usize;
            vec![(2 * j, 2 * j + 1)]
        }
        2 => {
            let a = p.x_mask().trailing_zeros() as usize;
            let b = 127 - p.x_mask().leading_zeros() as usize;
            vec![(2 * a, 2 * b), (2 * a, 2 * b + 1), (2 * a + 1, 2 * b), (2 * a + 1, 2 * b + 1)]
        }
        _ => return Err(not_quadratic()),
    };
    for (a, b) in candidates {
        let (ph, prod) = pauli_mul_unchecked(&majorana(n, a)?, &majorana(n, b)?);
        if prod == *p {
            return Ok((a, b, ph.to_complex()));
        }
    }
    Err(not_quadratic())
}

/// Antisymmetric real `m` (size `2L`) with `h = (i/4) sum m_ab g_a g_b`.
pub fn quadratic_generator(h: &PauliSum) -> Result<RMatrix, FloError> {
    let modes = 2 * h.n_qubits();
    let mut m = RMatrix::zeros(modes, modes);
    for (p, c) in h.terms() {
        if p.is_identity() {
            return Err(FloError::NotQuadratic(p.to_string()));
        }
        let (a, b, phase) = majorana_pair(p)?;
        // c P = c conj(phase) g_a g_b = (i/2) m_ab g_a g_b
        let v = Complex64::new(0.0, -2.0) * c * phase.conj();
        if v.im.abs() > 1e-12 * v.norm().max(1.0) {
            return Err(FloError::NotQuadratic(p.to_string()));
        }
        m[(a, b)] += v.re;
        m[(b, a)] -= v.re;
    }
    Ok(m)
}

/// Rotation of the Majorana operators induced by a free-fermion unitary.
/// Every unitary built here is connected to the identity through the
/// factor exponentials, so the cover sign stays `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianUnitary {
    pub l: usize,
    pub r: RMatrix,
    pub parity_sign: i8,
}

impl GaussianUnitary {
    pub fn identity(l: usize) -> Self {
        GaussianUnitary { l, r: RMatrix::identity(2 * l, 2 * l), parity_sign: 1 }
    }

    /// `self * other` as operators.
    pub fn compose(&self, other: &GaussianUnitary) -> Result<GaussianUnitary, FloError> {
        if self.l != other.l {
            return Err(FloError::SizeMismatch(self.l, other.l));
        }
        Ok(GaussianUnitary { l: self.l, r: &self.r * &other.r, parity_sign: self.parity_sign * other.parity_sign })
    }

    pub fn pow(&self, mut k: u64) -> GaussianUnitary {
        let mut result = GaussianUnitary::identity(self.l);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&base).expect("same size");
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base).expect("same size");
            }
        }
        result
    }

    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.r.transpose() * &self.r - RMatrix::identity(2 * self.l, 2 * self.l);
        g.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

#[derive(Debug, Clone)]
struct RotationBlock {
    modes: Vec<usize>,
    spectrum: HermitianSpectrum,
}

/// A quadratic generator split into independent mode blocks, ready for
/// `exp(t m)` at any `t`.
#[derive(Debug, Clone)]
pub struct CompiledRotation {
    modes: usize,
    blocks: Vec<RotationBlock>,
}

impl CompiledRotation {
    pub fn new(h: &PauliSum) -> Result<Self, FloError> {
        let m = quadratic_generator(h)?;
        let modes = m.nrows();
        let mut pairs = Vec::new();
        for a in 0..modes {
            for b in a + 1..modes {
                if m[(a, b)] != 0.0 {
                    pairs.push((a, b));
                }
            }
        }
        let comps = components(modes, &pairs);
        let blocks = comps
            .into_iter()
            .map(|modes_in| {
                let k = modes_in.len();
                // i m is Hermitian; exp(t m) = exp(-i t (i m))
                let herm = DMatrix::from_fn(k, k, |i, j| Complex64::new(0.0, m[(modes_in[i], modes_in[j])]));
                RotationBlock { modes: modes_in, spectrum: HermitianSpectrum::new(&herm) }
            })
            .collect();
        Ok(CompiledRotation { modes, blocks })
    }

    /// `r <- r * exp(t m)`.
    pub fn apply_right(&self, r: &mut RMatrix, t: f64) {
        for b in &self.blocks {
            let e = b.spectrum.evolve(t);
            let k = b.modes.len();
            let rows = r.nrows();
            let mut cols = RMatrix::zeros(rows, k);
            for (jj, &j) in b.modes.iter().enumerate() {
                cols.set_column(jj, &r.column(j));
            }
            let block = RMatrix::from_fn(k, k, |i, j| e[(i, j)].re);
            let out = cols * block;
            for (jj, &j) in b.modes.iter().enumerate() {
                r.set_column(j, &out.column(jj));
            }
        }
    }

    pub fn rotation(&self, t: f64) -> GaussianUnitary {
        let mut g = GaussianUnitary::identity(self.modes / 2);
        self.apply_right(&mut g.r, t);
        g
    }
}

/// Connected components of the mode coupling graph; isolated modes are dropped.
fn components(modes: usize, pairs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..modes).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    let mut touched = vec![false; modes];
    for &(a, b) in pairs {
        touched[a] = true;
        touched[b] = true;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for k in 0..modes {
        if touched[k] {
            let root = find(&mut parent, k);
            groups.entry(root).or_default().push(k);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}

/// `exp(-i t h)` as a rotation.
pub fn flo_exact(h: &PauliSum, t: f64) -> Result<GaussianUnitary, FloError> {
    Ok(CompiledRotation::new(h)?.rotation(t))
}

/// `(step(T/N))^N` for a fixed schedule.
pub fn flo_evaluate_schedule(s: &Schedule, t: f64, n: u64) -> Result<GaussianUnitary, FloError> {
    if n == 0 {
        return Err(FloError::ZeroSteps);
    }
    let l = s.generators.first().map(|g| g.sum.n_qubits()).unwrap_or(1);
    let compiled = s.generators.iter().map(|g| CompiledRotation::new(&g.sum)).collect::<Result<Vec<_>, _>>()?;
    let dt = t / n as f64;
    let mut step = GaussianUnitary::identity(l);
    for f in &s.factors {
        compiled[f.generator].apply_right(&mut step.r, f.multiplier * dt);
    }
    Ok(step.pow(n))
}

/// Product of an operator-ordered factor list (leftmost first).
pub fn flo_evaluate_factors(factors: &[TimedFactor], l: usize) -> Result<GaussianUnitary, FloError> {
    let mut g = GaussianUnitary::identity(l);
    for f in factors {
        if f.duration == 0.0 || f.generator.is_empty() {
            continue;
        }
        CompiledRotation::new(&f.generator)?.apply_right(&mut g.r, f.duration);
    }
    Ok(g)
}

/// Canonical angles `theta_k` in `[0, pi]` of an orthogonal matrix, from
/// the symmetric part (cosines) and, when every angle is below about
/// `1.47`, the antisymmetric part (sines, exact for small angles).
pub fn canonical_angles(w: &RMatrix) -> Vec<f64> {
    let n = w.nrows();
    let paired = |mut v: Vec<f64>| -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v.chunks(2).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect()
    };
    let sym = (w + w.transpose()) * 0.5;
    let cosines = paired(linalg::symmetric_eigenvalues(&sym).iter().map(|c| c.clamp(-1.0, 1.0)).collect());
    if cosines.first().copied().unwrap_or(1.0) > 0.1 {
        let anti = DMatrix::from_fn(n, n, |i, j| Complex64::new(0.0, 0.5 * (w[(i, j)] - w[(j, i)])));
        let sines = HermitianSpectrum::new(&anti).values;
        return paired(sines.iter().map(|s| s.abs().min(1.0)).collect()).into_iter().map(f64::asin).collect();
    }
    let mut theta: Vec<f64> = cosines.into_iter().map(f64::acos).collect();
    theta.reverse();
    theta
}

/// Worst-case error of the many-body unitaries behind two rotations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloErrorReport {
    /// Minimum over the unresolved global sign.
    pub sign_minimized: f64,
    /// Maximum over the unresolved global sign.
    pub pessimistic: f64,
    /// Whether sign patterns were enumerated exactly (otherwise the values
    /// above phases of `pi/2` are clamped bounds).
    pub exact: bool,
}

fn sign_pattern_extremes(half_angles: &[f64]) -> (f64, f64) {
    // max over patterns of |sin(phi/2)| and |cos(phi/2)|
    let mut phases = vec![0.0f64];
    for &h in half_angles {
        let mut next = Vec::with_capacity(phases.len() * 2);
        for p in &phases {
            next.push(p + h);
            next.push(p - h);
        }
        next.sort_by(f64::total_cmp);
        next.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        phases = next;
    }
    let max_sin = phases.iter().map(|p| (p / 2.0).sin().abs()).fold(0.0, f64::max);
    let max_cos = phases.iter().map(|p| (p / 2.0).cos().abs()).fold(0.0, f64::max);
    (2.0 * max_sin, 2.0 * max_cos)
}

pub fn flo_error_report(exact: &GaussianUnitary, apx: &GaussianUnitary) -> Result<FloErrorReport, FloError> {
    if exact.l != apx.l {
        return Err(FloError::SizeMismatch(exact.l, apx.l));
    }
    let w = exact.r.transpose() * &apx.r;
    let theta = canonical_angles(&w);
    let half: Vec<f64> = theta.iter().map(|t| t / 2.0).collect();
    let phi_max: f64 = half.iter().sum();
    let sign = (exact.parity_sign * apx.parity_sign) as f64;
    if phi_max <= std::f64::consts::FRAC_PI_2 {
        let near = 2.0 * (phi_max / 2.0).sin();
        // the opposite sign sees the phase closest to zero
        let far = if exact.l <= ENUMERATION_LIMIT { sign_pattern_extremes(&half).1 } else { 2.0 };
        let (plus, minus) = if sign > 0.0 { (near, far) } else { (far, near) };
        return Ok(FloErrorReport { sign_minimized: plus.min(minus), pessimistic: plus.max(minus), exact: exact.l <= ENUMERATION_LIMIT });
    }
    if exact.l <= ENUMERATION_LIMIT {
        let (s_plus, s_minus) = sign_pattern_extremes(&half);
        return Ok(FloErrorReport { sign_minimized: s_plus.min(s_minus), pessimistic: s_plus.max(s_minus), exact: true });
    }
    let clamped = 2.0 * (phi_max.min(std::f64::consts::PI) / 2.0).sin();
    Ok(FloErrorReport { sign_minimized: clamped, pessimistic: 2.0, exact: false })
}

/// Sign-minimised worst-case error.
pub fn flo_spectral_error(exact: &GaussianUnitary, apx: &GaussianUnitary) -> Result<f64, FloError> {
    Ok(flo_error_report(exact, apx)?.sign_minimized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;

    #[test]
    fn z_generator_block() {
        let h = PauliSum::from_real_terms(1, [(PauliString::single(1, 0, Pauli::Z).unwrap(), 1.0)]).unwrap();
        let m = quadratic_generator(&h).unwrap();
        assert_eq!(m[(0, 1)], -2.0);
        assert_eq!(m[(1, 0)], 2.0);
    }

    #[test]
    fn cubic_term_rejected() {
        let p = PauliString::parse("XXX").unwrap();
        let h = PauliSum::from_real_terms(3, [(p, 1.0)]).unwrap();
        assert!(matches!(quadratic_generator(&h), Err(FloError::NotQuadratic(_))));
    }

    #[test]
    fn components_split_disjoint_pairs() {
        let c = components(6, &[(0, 1), (3, 4), (1, 2)]);
        assert_eq!(c, vec![vec![0, 1, 2], vec![3, 4]]);
    }
}
