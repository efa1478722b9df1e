//! Convergence radius and term bounds for the Magnus series.
//!
//! With `g(x) = 2 + (x/2)(1 - cot(x/2))` and `G(s) = ∫_0^s dx / g(x)`, the
//! Taylor coefficients `x_l` of `G^{-1}` bound the series terms by
//! `‖Omega_l‖ <= x_l / 2 * (2 ∫‖H‖)^l`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::MagnusError;
use crate::quad::GaussLegendre;

/// Largest series order computed.
pub const MAX_SERIES_ORDER: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSeries {
    /// `x[l - 1]` is `x_l`.
    pub x: Vec<f64>,
    /// Exact coefficients behind `x`.
    pub x_exact: Vec<BigRational>,
    /// `bernoulli[k]` is `B_k` (with `B_1 = -1/2`).
    pub bernoulli: Vec<BigRational>,
    /// `G(2 pi) / 2`.
    pub threshold: f64,
}

impl ConvergenceSeries {
    pub fn x(&self, l: usize) -> f64 {
        self.x[l - 1]
    }

    pub fn l_max(&self) -> usize {
        self.x.len()
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `B_0..=B_n` from `sum_{k<=m} C(m+1, k) B_k = 0`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=n {
        let mut binom = BigInt::one(); // C(m+1, 0)
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from(BigInt::from(m + 1)));
    }
    b
}

/// Taylor coefficients of `g` up to degree `n`.
fn g_series(bernoulli: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut c = vec![BigRational::zero(); n + 1];
    c[0] = BigRational::one();
    if n >= 1 {
        c[1] = rat(1, 2);
    }
    let mut fact = BigInt::one();
    for m in 1..=n {
        fact *= BigInt::from(m);
        if m % 2 == 0 && m >= 2 {
            let b = &bernoulli[m];
            let abs = if b < &BigRational::zero() { -b.clone() } else { b.clone() };
            c[m] = abs / BigRational::from(fact.clone());
        }
    }
    c
}

/// Truncated product of two power series.
fn series_mul(a: &[BigRational], b: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); n + 1];
    for (i, ai) in a.iter().enumerate().take(n + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `g(x)` evaluated directly, switching to its series near zero.
pub fn g_value(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        // 1 + x/2 + x^2/12 + x^4/720
        1.0 + x / 2.0 + x * x / 12.0 + x.powi(4) / 720.0
    } else {
        2.0 + 0.5 * x - 0.5 * x / (0.5 * x).tan()
    }
}

/// `G(s) = ∫_0^s dx / g(x)` by composite Gauss-Legendre.
pub fn g_inverse_integral(s: f64) -> f64 {
    let gl = GaussLegendre::new(20);
    let panels = 256;
    let h = s / panels as f64;
    (0..panels).map(|k| gl.integrate(k as f64 * h, (k + 1) as f64 * h, |x| 1.0 / g_value(x))).sum()
}

pub fn convergence_series(l_max: usize) -> Result<ConvergenceSeries, MagnusError> {
    if l_max == 0 || l_max > MAX_SERIES_ORDER {
        return Err(MagnusError::SeriesOrder(l_max));
    }
    let bernoulli = bernoulli_numbers(l_max);
    let g = g_series(&bernoulli, l_max);
    // y(z) = G^{-1}(z) solves y' = g(y), y(0) = 0; match coefficients order by order
    let mut y = vec![BigRational::zero(); l_max + 1];
    for m in 0..l_max {
        // [z^m] g(y) only needs y up to degree m
        let mut power = vec![BigRational::zero(); l_max + 1];
        power[0] = BigRational::one();
        let mut gy = vec![BigRational::zero(); l_max + 1];
        for gk in g.iter().take(m + 1) {
            if !gk.is_zero() {
                for (slot, p) in gy.iter_mut().zip(&power) {
                    *slot += gk * p;
                }
            }
            power = series_mul(&power, &y, m);
        }
        y[m + 1] = gy[m].clone() / BigRational::from(BigInt::from(m + 1));
    }
    let x_exact: Vec<BigRational> = y[1..].to_vec();
    let x = x_exact.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    let threshold = 0.5 * g_inverse_integral(2.0 * std::f64::consts::PI);
    Ok(ConvergenceSeries { x, x_exact, bernoulli, threshold })
}

/// Bound on `‖Omega - Omega^{[k]}‖` from the series terms `k+1..=l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderBound {
    pub value: f64,
    pub first_term: usize,
    pub last_term: usize,
    /// Terms beyond `last_term` are not included; the value is a truncated
    /// sum of a convergent series, not a rigorous tail bound.
    pub tail_disclaimer: &'static str,
}

pub const TAIL_DISCLAIMER: &str = "series truncated at l_max; terms beyond it are omitted";

pub fn magnus_remainder_bound(
    k: usize,
    alpha: f64,
    t: f64,
    h1_norm_integral: f64,
    series: &ConvergenceSeries,
) -> Result<RemainderBound, MagnusError> {
    let arg = 2.0 * alpha.abs() * h1_norm_integral;
    if arg >= 2.0 * series.threshold || !arg.is_finite() || t < 0.0 {
        return Err(MagnusError::OutsideConvergence { argument: arg, limit: 2.0 * series.threshold });
    }
    let value = (k + 1..=series.l_max()).map(|l| 0.5 * series.x(l) * arg.powi(l as i32)).sum();
    Ok(RemainderBound { value, first_term: k + 1, last_term: series.l_max(), tail_disclaimer: TAIL_DISCLAIMER })
}
