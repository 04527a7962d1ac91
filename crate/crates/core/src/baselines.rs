//! Fixed-structure (HEA) and fully random (RND) comparison methods.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::driver::{random_angle, RunRecord, Tracer, COST_CONVENTION};
use crate::error::{Error, Result};
use crate::optimize::{descend, Charge, DescentConfig, Ledger, Objective, Stage};
use crate::space::{AnsatzPath, Axis, Encoding, LayerState, Rotation, StateSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeaConfig {
    pub n_qubits: usize,
    pub layers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RndConfig {
    /// Number of random candidates.
    pub samples: usize,
    pub layers: usize,
    /// Retrain every candidate instead of only the cheapest one.
    pub retrain_all: bool,
}

/// Greedy split of the ring `0->1, 1->2, ..., n-1->0` into qubit-disjoint
/// control masks: even controls first, then whatever is left.
fn ring_batches(n: usize) -> Vec<u32> {
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut batches = Vec::new();
    while !remaining.is_empty() {
        let mut used = 0u32;
        let mut mask = 0u32;
        remaining.retain(|&c| {
            let t = (c + 1) % n;
            if used & (1 << c) != 0 || used & (1 << t) != 0 {
                return true;
            }
            used |= (1 << c) | (1 << t);
            mask |= 1 << c;
            false
        });
        batches.push(mask);
    }
    batches
}

fn hea_block(n: usize, ry: Encoding, rz: Encoding) -> Result<Vec<LayerState>> {
    let batches = ring_batches(n);
    let ry_layer = LayerState::new(vec![Some(Rotation { axis: Axis::Y, encoding: ry }); n], 0)?;
    let rz_layer = LayerState::new(vec![Some(Rotation { axis: Axis::Z, encoding: rz }); n], batches[0])?;
    let mut out = vec![ry_layer, rz_layer];
    for &mask in &batches[1..] {
        out.push(LayerState::new(vec![None; n], mask)?);
    }
    Ok(out)
}

/// `layers` repetitions of: Ry on every qubit, Rz on every qubit, then the
/// full CNOT ring spread over as many layer states as it needs.
pub fn build_hea(cfg: &HeaConfig) -> Result<AnsatzPath> {
    if cfg.layers == 0 {
        return Err(Error::Config("HEA needs at least one layer".into()));
    }
    let mut layers = Vec::new();
    for _ in 0..cfg.layers {
        layers.extend(hea_block(cfg.n_qubits, Encoding::Direct, Encoding::Direct)?);
    }
    AnsatzPath::new(layers)
}

/// HEA for encoded tasks: `encoding_layers` blocks with linear encodings,
/// then `processing_layers` plain blocks.
pub fn build_hea_meta(n: usize, encoding_layers: usize, processing_layers: usize) -> Result<AnsatzPath> {
    if encoding_layers + processing_layers == 0 {
        return Err(Error::Config("HEA needs at least one layer".into()));
    }
    let mut layers = Vec::new();
    for _ in 0..encoding_layers {
        layers.extend(hea_block(n, Encoding::Linear, Encoding::Linear)?);
    }
    for _ in 0..processing_layers {
        layers.extend(hea_block(n, Encoding::Direct, Encoding::Direct)?);
    }
    AnsatzPath::new(layers)
}

fn record(
    method: &str,
    seed: u64,
    n_layers: usize,
    path: &AnsatzPath,
    params: Vec<f64>,
    cost: f64,
    exact: Option<f64>,
    ledger: &Ledger,
    terminations: BTreeMap<String, String>,
    tracer: Tracer,
) -> RunRecord {
    RunRecord {
        method: method.into(),
        seed,
        n_qubits: path.n_qubits(),
        n_layers,
        path: path.to_text(),
        params,
        cost,
        exact_energy: exact,
        abs_error: exact.map(|e| (cost - e).abs()),
        quantum_cost: ledger.total(),
        breakdown: ledger.summary(),
        terminations,
        sampling: None,
        cost_convention: COST_CONVENTION.into(),
        trace: tracer.into_points(),
    }
}

/// Descent on an arbitrary fixed path from uniform random slots.
pub fn run_fixed(
    method: &str,
    obj: &dyn Objective,
    path: &AnsatzPath,
    n_layers: usize,
    descent: &DescentConfig,
    seed: u64,
    exact: Option<f64>,
    ledger: &Ledger,
) -> Result<RunRecord> {
    ledger.set_stage(Stage::Baseline);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init: Vec<f64> = (0..path.slot_count()).map(|_| random_angle(&mut rng)).collect();
    let mut tracer = Tracer::new();
    let out = descend(obj, path, &init, descent, ledger, |q, c| tracer.record(q, c, Stage::Baseline))?;
    let mut term = BTreeMap::new();
    term.insert("descent".to_string(), format!("{:?}", out.termination));
    Ok(record(method, seed, n_layers, path, out.params, out.cost, exact, ledger, term, tracer))
}

pub fn run_hea(
    obj: &dyn Objective,
    cfg: &HeaConfig,
    descent: &DescentConfig,
    seed: u64,
    exact: Option<f64>,
    ledger: &Ledger,
) -> Result<RunRecord> {
    let path = build_hea(cfg)?;
    run_fixed(&format!("hea-{}", cfg.layers), obj, &path, cfg.layers, descent, seed, exact, ledger)
}

/// Pre-retraining scores of an RND run, in draw order.
#[derive(Debug, Clone)]
pub struct RndCandidates {
    pub paths: Vec<AnsatzPath>,
    pub params: Vec<Vec<f64>>,
    pub costs: Vec<f64>,
}

/// Draws and scores `samples` constraint-valid paths with random slots. The
/// draws depend only on the rng, so a shorter run sees a prefix of a longer
/// one.
pub fn rnd_candidates(
    obj: &dyn Objective,
    space: &StateSpace,
    samples: usize,
    rng: &mut ChaCha8Rng,
    ledger: &Ledger,
) -> Result<RndCandidates> {
    let mut paths = Vec::with_capacity(samples);
    let mut params = Vec::with_capacity(samples);
    for _ in 0..samples {
        let p = space.sample_uniform(rng);
        params.push((0..p.slot_count()).map(|_| random_angle(rng)).collect::<Vec<f64>>());
        paths.push(p);
    }
    let costs: Vec<f64> = paths
        .par_iter()
        .zip(&params)
        .map(|(p, t)| obj.evaluate(p, t))
        .collect::<Result<_>>()?;
    for p in &paths {
        ledger.charge_with(Charge::Cost, 1, p.rotation_count());
    }
    Ok(RndCandidates { paths, params, costs })
}

pub fn run_rnd(
    obj: &dyn Objective,
    space: &StateSpace,
    cfg: &RndConfig,
    descent: &DescentConfig,
    seed: u64,
    exact: Option<f64>,
    ledger: &Ledger,
) -> Result<RunRecord> {
    if cfg.samples == 0 {
        return Err(Error::Config("RND needs at least one sample".into()));
    }
    ledger.set_stage(Stage::Baseline);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracer = Tracer::new();
    let cands = rnd_candidates(obj, space, cfg.samples, &mut rng, ledger)?;
    // Samples are charged in draw order, one unit each.
    let base = ledger.total() - cfg.samples as u64;
    for (i, &c) in cands.costs.iter().enumerate() {
        tracer.record(base + i as u64 + 1, c, Stage::Baseline);
    }
    ledger.set_stage(Stage::Retraining);
    let order: Vec<usize> = if cfg.retrain_all {
        (0..cfg.samples).collect()
    } else {
        vec![argmin(&cands.costs)]
    };
    let mut best: Option<(usize, Vec<f64>, f64, String)> = None;
    for i in order {
        let out = descend(obj, &cands.paths[i], &cands.params[i], descent, ledger, |q, c| {
            tracer.record(q, c, Stage::Retraining)
        })?;
        if best.as_ref().is_none_or(|b| out.cost < b.2) {
            best = Some((i, out.params, out.cost, format!("{:?}", out.termination)));
        }
    }
    let (i, params, cost, stop) = best.expect("at least one candidate");
    let mut term = BTreeMap::new();
    term.insert("retrain".to_string(), stop);
    Ok(record("rnd", seed, cfg.layers, &cands.paths[i], params, cost, exact, ledger, term, tracer))
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}
