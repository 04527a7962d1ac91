use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{LedgerSummary, Stage};
use crate::space::SamplingMode;

pub const COST_CONVENTION: &str =
    "one unit per full cost evaluation; a gradient costs two per rotation; every line-search trial costs one";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub quantum_cost: u64,
    pub best_cost_so_far: f64,
    pub stage: Stage,
}

/// Running minimum of evaluated costs against the ledger total.
#[derive(Debug, Clone, Default)]
pub struct Tracer {
    points: Vec<TracePoint>,
    best: Option<f64>,
}

impl Tracer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, quantum_cost: u64, cost: f64, stage: Stage) {
        let best = self.best.map_or(cost, |b| b.min(cost));
        self.best = Some(best);
        self.points.push(TracePoint { quantum_cost, best_cost_so_far: best, stage });
    }

    pub fn best(&self) -> Option<f64> {
        self.best
    }

    pub fn into_points(self) -> Vec<TracePoint> {
        self.points
    }
}

/// Outcome of one seeded run of any method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub seed: u64,
    pub n_qubits: usize,
    pub n_layers: usize,
    pub path: String,
    pub params: Vec<f64>,
    pub cost: f64,
    pub exact_energy: Option<f64>,
    pub abs_error: Option<f64>,
    pub quantum_cost: u64,
    pub breakdown: LedgerSummary,
    pub terminations: BTreeMap<String, String>,
    pub sampling: Option<SamplingMode>,
    pub cost_convention: String,
    pub trace: Vec<TracePoint>,
}

impl RunRecord {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))
    }

    /// `quantum_cost,best_cost_so_far,stage` rows with a header.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("quantum_cost,best_cost_so_far,stage\n");
        for p in &self.trace {
            out.push_str(&format!("{},{:.12},{}\n", p.quantum_cost, p.best_cost_so_far, p.stage.label()));
        }
        out
    }
}

/// Mean squared deviation of final costs from the exact value.
pub fn mse(finals: &[f64], exact: f64) -> Result<f64> {
    if finals.is_empty() {
        return Err(Error::Empty("no final costs".into()));
    }
    Ok(finals.iter().map(|c| (c - exact).powi(2)).sum::<f64>() / finals.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[-1.0, -1.0], -1.0).unwrap(), 0.0);
        assert!((mse(&[-0.9, -1.1], -1.0).unwrap() - 0.01).abs() < 1e-15);
        assert!(mse(&[], 0.0).is_err());
    }

    #[test]
    fn tracer_keeps_running_min() {
        let mut t = Tracer::new();
        t.record(1, 0.5, Stage::Baseline);
        t.record(2, 0.7, Stage::Baseline);
        t.record(5, 0.1, Stage::Baseline);
        let pts = t.into_points();
        let best: Vec<f64> = pts.iter().map(|p| p.best_cost_so_far).collect();
        assert_eq!(best, vec![0.5, 0.5, 0.1]);
    }
}
