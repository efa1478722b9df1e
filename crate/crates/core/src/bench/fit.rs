use std::collections::BTreeMap;

use super::csv::SCALING_HEADER;
use super::BenchError;
use crate::formulas::FormulaKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    pub size: f64,
    pub depth: f64,
    pub weight: f64,
}

/// Result of fitting `d = a L^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub k: f64,
    /// Covariance of `(ln a, k)`, taking the weights as inverse variances.
    pub covariance: [[f64; 2]; 2],
    pub points_used: usize,
}

impl FitResult {
    pub fn k_stderr(&self) -> f64 {
        self.covariance[1][1].sqrt()
    }

    pub fn predict(&self, size: f64) -> f64 {
        self.a * size.powf(self.k)
    }
}

/// Weight of a depth measurement whose uncertainty is one step: the log
/// depth then carries `sigma = depth_step / depth`.
pub fn depth_weight(depth: f64, depth_step: f64) -> f64 {
    (depth / depth_step).powi(2)
}

/// Weighted least squares of `ln d = ln a + k ln L`.
pub fn powerlaw_fit(points: &[FitPoint]) -> Result<FitResult, BenchError> {
    if points.len() < 3 {
        return Err(BenchError::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|p| !(p.size > 0.0 && p.depth > 0.0 && p.weight > 0.0) || !p.weight.is_finite()) {
        return Err(BenchError::Fit("sizes, depths and weights must be positive".into()));
    }
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let (x, y, w) = (p.size.ln(), p.depth.ln(), p.weight);
        s += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = s * sxx - sx * sx;
    if !(det > 1e-12 * s * sxx) {
        return Err(BenchError::Fit("degenerate design: all sizes equal".into()));
    }
    let k = (s * sxy - sx * sy) / det;
    let log_a = (sxx * sy - sx * sxy) / det;
    let covariance = [[sxx / det, -sx / det], [-sx / det, s / det]];
    Ok(FitResult { a: log_a.exp(), k, covariance, points_used: points.len() })
}

/// Reads a scaling CSV and returns the fit points per formula, skipping
/// rows where the threshold was not reached.
pub fn parse_scaling_csv(text: &str) -> Result<BTreeMap<FormulaKind, Vec<FitPoint>>, BenchError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| BenchError::Config("empty scaling file".into()))?;
    if header.split(',').collect::<Vec<_>>() != SCALING_HEADER {
        return Err(BenchError::Config(format!("unexpected scaling header {header:?}")));
    }
    let col = |name: &str| SCALING_HEADER.iter().position(|h| *h == name).expect("known column");
    let (c_size, c_formula, c_depth, c_step) = (col("L"), col("formula"), col("two_qubit_depth"), col("depth_step"));
    let mut out: BTreeMap<FormulaKind, Vec<FitPoint>> = BTreeMap::new();
    for (i, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let bad = |msg: &str| BenchError::Config(format!("scaling line {}: {msg}", i + 1));
        if cells.len() != SCALING_HEADER.len() {
            return Err(bad("wrong column count"));
        }
        let formula = FormulaKind::parse(cells[c_formula]).ok_or_else(|| bad("unknown formula"))?;
        if cells[c_depth] == "NA" {
            continue;
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
        let (size, depth, step) = (num(cells[c_size])?, num(cells[c_depth])?, num(cells[c_step])?);
        out.entry(formula).or_default().push(FitPoint { size, depth, weight: depth_weight(depth, step) });
    }
    Ok(out)
}
