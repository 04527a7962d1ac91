//! Layer-wise ansatz search space on a ring of qubits.

mod canon;
mod constraints;
mod layer;
mod ops;

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use canon::canonicalize;
pub use constraints::{check_constraints, is_valid, LayerMasks, Rule, ScanContext, Violation};
pub use layer::{AnsatzPath, Axis, Encoding, LayerState, Rotation};
pub use ops::{apply_operator, propose, GeneticOperator, RawOffspring, MAX_OPERATOR_RETRIES};

use crate::error::{Error, Result};
use crate::sim::MAX_QUBITS;

/// Qubit-disjoint subsets of the directed ring edges `q -> q+1`, as control
/// masks, ascending.
pub fn independent_edge_sets(n: usize) -> Vec<u32> {
    (0u32..1 << n)
        .filter(|&mask| {
            let mut used = 0u32;
            for c in 0..n {
                if mask & (1 << c) != 0 {
                    let t = (c + 1) % n;
                    if used & (1 << c) != 0 || used & (1 << t) != 0 {
                        return false;
                    }
                    used |= (1 << c) | (1 << t);
                }
            }
            true
        })
        .collect()
}

/// Every layer built from {none, Ry, Rz} per qubit and a disjoint CNOT set.
pub fn enumerate_layer_states(n: usize) -> Vec<LayerState> {
    assert!((2..=MAX_QUBITS).contains(&n), "layer states need 2..={MAX_QUBITS} qubits");
    let edge_sets = independent_edge_sets(n);
    let mut out = Vec::with_capacity(3usize.pow(n as u32) * edge_sets.len());
    for code in 0..3usize.pow(n as u32) {
        let mut rot = vec![None; n];
        let mut c = code;
        for q in (0..n).rev() {
            rot[q] = match c % 3 {
                0 => None,
                1 => Some(Rotation::ry()),
                _ => Some(Rotation::rz()),
            };
            c /= 3;
        }
        for &mask in &edge_sets {
            out.push(LayerState::new(rot.clone(), mask).expect("generated layer is well formed"));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingMode {
    Exact,
    Approximate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub n_qubits: usize,
    pub n_layers: usize,
    /// Encodings a rotation may carry. `[Direct]` for plain VQE.
    pub encodings: Vec<Encoding>,
    /// Upper bound on memoized count-table entries.
    pub memo_budget: usize,
    /// Largest register for which exact uniform sampling is attempted.
    pub exact_max_qubits: usize,
}

impl SpaceConfig {
    pub fn new(n_qubits: usize, n_layers: usize) -> Self {
        Self {
            n_qubits,
            n_layers,
            encodings: vec![Encoding::Direct],
            memo_budget: 4_000_000,
            exact_max_qubits: 4,
        }
    }
}

struct Structure {
    state: LayerState,
    masks: LayerMasks,
    /// Number of encoding assignments of this structure.
    weight: u128,
}

/// Memoized number of valid completions from each reachable context.
struct CountTable {
    memo: HashMap<(usize, u64), u128>,
}

/// The search space: layer catalog, counting and sampling.
pub struct StateSpace {
    cfg: SpaceConfig,
    structures: Vec<Structure>,
    total_weight: u128,
    table: Option<CountTable>,
}

impl StateSpace {
    pub fn new(cfg: SpaceConfig) -> Result<Self> {
        let n = cfg.n_qubits;
        if !(2..=MAX_QUBITS).contains(&n) {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        if cfg.n_layers == 0 {
            return Err(Error::Config("search space needs at least one layer".into()));
        }
        if cfg.encodings.is_empty() {
            return Err(Error::Config("at least one encoding is required".into()));
        }
        let e = cfg.encodings.len() as u128;
        let structures: Vec<Structure> = enumerate_layer_states(n)
            .into_iter()
            .map(|state| {
                let weight = e.pow(state.rotation_count() as u32);
                Structure { masks: LayerMasks::of(&state), state, weight }
            })
            .collect();
        let total_weight = structures.iter().map(|s| s.weight).sum();
        let mut space = Self { cfg, structures, total_weight, table: None };
        if n <= space.cfg.exact_max_qubits {
            space.table = Some(space.build_table()?);
        }
        Ok(space)
    }

    pub fn config(&self) -> &SpaceConfig {
        &self.cfg
    }

    pub fn n_qubits(&self) -> usize {
        self.cfg.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.cfg.n_layers
    }

    pub fn encodings(&self) -> &[Encoding] {
        &self.cfg.encodings
    }

    /// Number of distinct layer states (structures times encodings).
    pub fn state_count(&self) -> u128 {
        self.total_weight
    }

    pub fn sampling_mode(&self) -> SamplingMode {
        if self.table.is_some() {
            SamplingMode::Exact
        } else {
            SamplingMode::Approximate
        }
    }

    fn build_table(&self) -> Result<CountTable> {
        let mut memo = HashMap::new();
        let start = ScanContext::start(self.cfg.n_qubits);
        self.fill(&start, &mut memo)?;
        Ok(CountTable { memo })
    }

    fn fill(&self, ctx: &ScanContext, memo: &mut HashMap<(usize, u64), u128>) -> Result<u128> {
        if ctx.depth == self.cfg.n_layers {
            return Ok(1);
        }
        if let Some(&v) = memo.get(&(ctx.depth, ctx.key())) {
            return Ok(v);
        }
        let n = self.cfg.n_qubits;
        let mut total = 0u128;
        for s in &self.structures {
            if let Some(next) = ctx.try_advance(&s.masks, n) {
                total += s.weight * self.fill(&next, memo)?;
            }
        }
        if memo.len() >= self.cfg.memo_budget {
            return Err(Error::BudgetExceeded(format!(
                "count table exceeds {} entries",
                self.cfg.memo_budget
            )));
        }
        memo.insert((ctx.depth, ctx.key()), total);
        Ok(total)
    }

    fn completions(&self, ctx: &ScanContext) -> u128 {
        if ctx.depth == self.cfg.n_layers {
            return 1;
        }
        let table = self.table.as_ref().expect("exact table present");
        table.memo[&(ctx.depth, ctx.key())]
    }

    /// Number of valid paths, or all `state_count^n_layers` sequences when
    /// `constrained` is false.
    pub fn count_paths(&self, constrained: bool) -> Result<u128> {
        if !constrained {
            return self
                .total_weight
                .checked_pow(self.cfg.n_layers as u32)
                .ok_or_else(|| Error::BudgetExceeded("unconstrained count overflows".into()));
        }
        match &self.table {
            Some(_) => Ok(self.completions(&ScanContext::start(self.cfg.n_qubits))),
            None => {
                let mut memo = HashMap::new();
                self.fill(&ScanContext::start(self.cfg.n_qubits), &mut memo)
            }
        }
    }

    /// All valid paths (constrained) in lexicographic structure order. Only
    /// for spaces with a single encoding.
    pub fn enumerate_paths(&self, limit: usize) -> Result<Vec<AnsatzPath>> {
        if self.cfg.encodings.len() != 1 {
            return Err(Error::Config("path listing requires a single encoding".into()));
        }
        let count = self.count_paths(true)?;
        if count > limit as u128 {
            return Err(Error::BudgetExceeded(format!("{count} paths exceed listing limit {limit}")));
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut prefix = Vec::new();
        self.walk(&ScanContext::start(self.cfg.n_qubits), &mut prefix, &mut out);
        Ok(out)
    }

    fn walk(&self, ctx: &ScanContext, prefix: &mut Vec<LayerState>, out: &mut Vec<AnsatzPath>) {
        if ctx.depth == self.cfg.n_layers {
            let layers = prefix.iter().map(|s| self.with_encoding(s, self.cfg.encodings[0])).collect();
            out.push(AnsatzPath::new(layers).expect("valid layers"));
            return;
        }
        for s in &self.structures {
            if let Some(next) = ctx.try_advance(&s.masks, self.cfg.n_qubits) {
                prefix.push(s.state.clone());
                self.walk(&next, prefix, out);
                prefix.pop();
            }
        }
    }

    fn with_encoding(&self, s: &LayerState, e: Encoding) -> LayerState {
        let mut out = s.clone();
        for q in 0..s.n_qubits() {
            if let Some(r) = s.rotation(q) {
                out.set_rotation(q, Some(Rotation { axis: r.axis, encoding: e }));
            }
        }
        out
    }

    fn random_encodings<R: Rng + ?Sized>(&self, s: &LayerState, rng: &mut R) -> LayerState {
        let mut out = s.clone();
        for q in 0..s.n_qubits() {
            if let Some(r) = s.rotation(q) {
                let e = self.cfg.encodings[rng.gen_range(0..self.cfg.encodings.len())];
                out.set_rotation(q, Some(Rotation { axis: r.axis, encoding: e }));
            }
        }
        out
    }

    /// A layer state drawn uniformly from the full catalog.
    pub fn random_state<R: Rng + ?Sized>(&self, rng: &mut R) -> LayerState {
        let mut pick = rng.gen_range(0..self.total_weight);
        for s in &self.structures {
            if pick < s.weight {
                return self.random_encodings(&s.state, rng);
            }
            pick -= s.weight;
        }
        unreachable!("weights sum to total")
    }

    /// A valid path, exactly uniform when the count table is available,
    /// otherwise uniform over valid extensions layer by layer.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> AnsatzPath {
        let n = self.cfg.n_qubits;
        let mut ctx = ScanContext::start(n);
        let mut layers = Vec::with_capacity(self.cfg.n_layers);
        let mut options: Vec<(usize, ScanContext, u128)> = Vec::with_capacity(self.structures.len());
        while ctx.depth < self.cfg.n_layers {
            options.clear();
            let mut total = 0u128;
            for (i, s) in self.structures.iter().enumerate() {
                if let Some(next) = ctx.try_advance(&s.masks, n) {
                    let w = match self.table {
                        Some(_) => s.weight * self.completions(&next),
                        None => s.weight,
                    };
                    if w > 0 {
                        total += w;
                        options.push((i, next, w));
                    }
                }
            }
            let mut pick = rng.gen_range(0..total);
            let &(idx, next, _) = options
                .iter()
                .find(|(_, _, w)| {
                    if pick < *w {
                        true
                    } else {
                        pick -= *w;
                        false
                    }
                })
                .expect("pick below total");
            layers.push(self.random_encodings(&self.structures[idx].state, rng));
            ctx = next;
        }
        AnsatzPath::new(layers).expect("valid layers")
    }
}
