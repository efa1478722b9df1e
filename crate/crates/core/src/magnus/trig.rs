//! Finite trigonometric sums `f(t) = sum_k c_k e^{i w_k t}` with exact
//! integrals.

use num_complex::Complex64;

/// Frequencies closer than this are treated as equal.
pub const FREQ_TOL: f64 = 1e-12;
const AMP_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    /// `(frequency, amplitude)` sorted by frequency, frequencies distinct.
    terms: Vec<(f64, Complex64)>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly { terms: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_terms([(0.0, c)])
    }

    pub fn from_terms<I: IntoIterator<Item = (f64, Complex64)>>(terms: I) -> Self {
        let mut raw: Vec<(f64, Complex64)> = terms.into_iter().map(|(w, c)| (if w.abs() < FREQ_TOL { 0.0 } else { w }, c)).collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut terms: Vec<(f64, Complex64)> = Vec::with_capacity(raw.len());
        for (w, c) in raw {
            match terms.last_mut() {
                Some(last) if (last.0 - w).abs() < FREQ_TOL => last.1 += c,
                _ => terms.push((w, c)),
            }
        }
        terms.retain(|(_, c)| c.norm() > AMP_TOL);
        TrigPoly { terms }
    }

    /// `c cos(w t)`.
    pub fn cos(w: f64, c: Complex64) -> Self {
        Self::from_terms([(w, c * 0.5), (-w, c * 0.5)])
    }

    /// `c sin(w t)`.
    pub fn sin(w: f64, c: Complex64) -> Self {
        let half = c * Complex64::new(0.0, -0.5);
        Self::from_terms([(w, half), (-w, -half)])
    }

    pub fn terms(&self) -> &[(f64, Complex64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).copied())
    }

    pub fn scale(&self, c: Complex64) -> TrigPoly {
        Self::from_terms(self.terms.iter().map(|&(w, a)| (w, a * c)))
    }

    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        Self::from_terms(self.terms.iter().flat_map(|&(w1, a1)| other.terms.iter().map(move |&(w2, a2)| (w1 + w2, a1 * a2))))
    }

    pub fn conj(&self) -> TrigPoly {
        Self::from_terms(self.terms.iter().map(|&(w, a)| (-w, a.conj())))
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|&(w, a)| a * Complex64::from_polar(1.0, w * t)).sum()
    }

    /// True when `f(t)` is real for all `t`, i.e. amplitudes pair up as
    /// `(w, c)` and `(-w, conj c)`.
    pub fn is_real(&self, tol: f64) -> bool {
        let c = self.conj();
        self.terms.len() == c.terms.len()
            && self.terms.iter().zip(&c.terms).all(|(a, b)| (a.0 - b.0).abs() < FREQ_TOL && (a.1 - b.1).norm() <= tol)
    }

    /// `∫_a^b f(t) dt` in closed form.
    pub fn integrate(&self, a: f64, b: f64) -> Complex64 {
        let len = b - a;
        self.terms
            .iter()
            .map(|&(w, c)| c * Complex64::from_polar(1.0, w * a) * len * phi1(Complex64::new(0.0, w * len)))
            .sum()
    }
}

/// `(e^z - 1) / z`, accurate near `z = 0`.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..30 {
            term *= z / k as f64;
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Divided differences `(exp[z0,z1], exp[z1,z2], exp[z0,z1,z2])` obtained
/// as entries of the exponential of a bidiagonal 3x3 matrix.
fn exp_divided_differences(z: [Complex64; 3]) -> (Complex64, Complex64, Complex64) {
    type M3 = [[Complex64; 3]; 3];
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mul = |a: &M3, b: &M3| -> M3 {
        let mut c = [[zero; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                for k in i..=j {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    };
    let norm = z.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let squarings = (norm / 0.25).log2().ceil().max(0.0) as u32;
    let scale = 0.5f64.powi(squarings as i32);
    let a: M3 = [[z[0] * scale, one * scale, zero], [zero, z[1] * scale, one * scale], [zero, zero, z[2] * scale]];
    let mut result: M3 = [[one, zero, zero], [zero, one, zero], [zero, zero, one]];
    let mut term = result;
    for k in 1..25 {
        term = mul(&term, &a);
        let inv = 1.0 / k as f64;
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v *= inv;
            }
        }
        for i in 0..3 {
            for j in i..3 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mul(&result, &result);
    }
    (result[0][1], result[1][2], result[0][2])
}

/// `∬_{[a, a+len]^2} e^{i w1 t1} e^{i w2 t2} sign(t1 - t2) dt1 dt2`.
fn signed_pair_integral(w1: f64, w2: f64, a: f64, len: f64) -> Complex64 {
    let x = w1 * len;
    let y = w2 * len;
    let z = [Complex64::new(0.0, 0.0), Complex64::new(0.0, x), Complex64::new(0.0, x + y)];
    // J = ∫_0^1 e^{ixu} ∫_0^u e^{iyv} dv du is the second divided difference
    let (_, _, j) = exp_divided_differences(z);
    let fx = phi1(Complex64::new(0.0, x));
    let fy = phi1(Complex64::new(0.0, y));
    let unit = 2.0 * j - fx * fy;
    unit * len * len * Complex64::from_polar(1.0, (w1 + w2) * a)
}

/// `∬_{[a, a+len]^2} f(t1) g(t2) sign(t1 - t2) dt1 dt2`, summed in closed
/// form over all frequency pairs.
pub fn signed_double_integral(f: &TrigPoly, g: &TrigPoly, a: f64, len: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(w1, c1) in &f.terms {
        for &(w2, c2) in &g.terms {
            acc += c1 * c2 * signed_pair_integral(w1, w2, a, len);
        }
    }
    acc
}
