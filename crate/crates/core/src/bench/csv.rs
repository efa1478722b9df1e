use std::fmt::Write as _;

use super::{Landscape, ScalingRow, SweepConfig};

/// Floats with 17 significant digits, enough to round-trip.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV body preceded by `#` comment lines. The optional timestamp is the
/// only line that differs between identical runs.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvDocument {
    pub comments: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDocument {
    pub fn body(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn render(&self, timestamp: Option<u64>) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        if let Some(ts) = timestamp {
            let _ = writeln!(s, "# generated_unix {ts}");
        }
        s + &self.body()
    }
}

pub const LANDSCAPE_HEADER: [&str; 14] = [
    "model",
    "engine",
    "seed",
    "alpha",
    "T",
    "budget",
    "formula",
    "steps",
    "two_qubit_depth",
    "cnot_depth",
    "metric",
    "error",
    "is_best",
    "error_max_sign",
];

pub fn landscape_csv(cfg: &SweepConfig, land: &Landscape) -> CsvDocument {
    let mut comments = vec!["thrift-bench landscape".to_string(), format!("config {}", cfg.to_json())];
    comments.extend(land.warnings.iter().map(|w| format!("warning {w}")));
    let rows = land
        .rows
        .iter()
        .map(|r| {
            vec![
                r.model.name().to_string(),
                r.engine.name().to_string(),
                r.seed.to_string(),
                fmt_float(r.alpha),
                fmt_float(r.t),
                r.budget.to_string(),
                r.formula.name().to_string(),
                r.steps.to_string(),
                r.two_qubit_depth.to_string(),
                r.cnot_depth.to_string(),
                r.metric.name().to_string(),
                fmt_float(r.error.error),
                (r.is_best as u8).to_string(),
                fmt_float(r.error.error_max_sign),
            ]
        })
        .collect();
    CsvDocument { comments, header: LANDSCAPE_HEADER.to_vec(), rows }
}

pub const SCALING_HEADER: [&str; 14] = [
    "model",
    "engine",
    "seed",
    "L",
    "alpha",
    "T",
    "epsilon",
    "formula",
    "steps",
    "two_qubit_depth",
    "cnot_depth",
    "depth_step",
    "metric",
    "error",
];

pub fn scaling_csv(cfg: &SweepConfig, rows: &[ScalingRow]) -> CsvDocument {
    let na = |v: Option<u64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                r.model.name().to_string(),
                r.engine.name().to_string(),
                r.seed.to_string(),
                r.size.to_string(),
                fmt_float(r.alpha),
                fmt_float(r.t),
                fmt_float(r.epsilon),
                r.formula.name().to_string(),
                na(r.steps),
                na(r.two_qubit_depth),
                na(r.cnot_depth),
                r.depth_step.to_string(),
                r.metric.name().to_string(),
                fmt_float(r.error),
            ]
        })
        .collect();
    CsvDocument {
        comments: vec!["thrift-bench scaling".to_string(), format!("config {}", cfg.to_json())],
        header: SCALING_HEADER.to_vec(),
        rows,
    }
}
