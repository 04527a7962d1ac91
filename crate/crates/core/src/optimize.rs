//! Cost evaluation, parameter-shift gradients, Armijo backtracking descent
//! and quantum-cost accounting.

use std::f64::consts::FRAC_PI_2;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::circuit::{encoded_angles, run_circuit};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::sim::{DensityMatrix, NoiseSpec};
use crate::space::AnsatzPath;

/// Classical post-processing applied to an expectation value. Only the
/// identity keeps the parameter-shift rule exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Wrapper {
    #[default]
    Identity,
}

impl Wrapper {
    pub fn apply(self, value: f64) -> f64 {
        match self {
            Wrapper::Identity => value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskTerm {
    pub observable: PauliSum,
    pub input: DensityMatrix,
    pub wrapper: Wrapper,
}

/// A list of (observable, input state, wrapper) tuples whose wrapped
/// expectations are summed.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    n: usize,
    terms: Vec<TaskTerm>,
}

impl TaskSpec {
    /// Ground-state search for `h` from `|0...0>`.
    pub fn ground_state(h: PauliSum) -> Result<Self> {
        let input = DensityMatrix::zero_state(h.n_qubits())?;
        Self::new(vec![TaskTerm { observable: h, input, wrapper: Wrapper::Identity }])
    }

    pub fn new(terms: Vec<TaskTerm>) -> Result<Self> {
        let n = terms
            .first()
            .map(|t| t.observable.n_qubits())
            .ok_or_else(|| Error::Empty("task has no terms".into()))?;
        for t in &terms {
            if t.observable.n_qubits() != n || t.input.n_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if t.observable.n_qubits() != n { t.observable.n_qubits() } else { t.input.n_qubits() },
                });
            }
        }
        Ok(Self { n, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[TaskTerm] {
        &self.terms
    }

    /// Cost at explicit rotation angles.
    pub fn evaluate_angles(&self, path: &AnsatzPath, angles: &[f64], noise: &NoiseSpec) -> Result<f64> {
        let mut total = 0.0;
        for t in &self.terms {
            let rho = run_circuit(path, angles, &t.input, noise)?;
            total += t.wrapper.apply(rho.expectation(&t.observable)?);
        }
        Ok(total)
    }
}

/// Something with a cost over (path, trainable slots) and a gradient built
/// from cost evaluations.
pub trait Objective: Send + Sync {
    fn n_qubits(&self) -> usize;

    /// One full cost evaluation (not counted).
    fn evaluate(&self, path: &AnsatzPath, params: &[f64]) -> Result<f64>;

    /// Gradient with respect to the slots, and the number of cost
    /// evaluations it consumed.
    fn gradient_uncounted(&self, path: &AnsatzPath, params: &[f64]) -> Result<(Vec<f64>, u64)>;
}

/// Parameter-shift derivative with respect to each rotation angle.
pub fn shift_derivatives<F>(angles: &[f64], mut eval: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut shifted = angles.to_vec();
    let mut out = Vec::with_capacity(angles.len());
    for k in 0..angles.len() {
        shifted[k] = angles[k] + FRAC_PI_2;
        let plus = eval(&shifted)?;
        shifted[k] = angles[k] - FRAC_PI_2;
        let minus = eval(&shifted)?;
        shifted[k] = angles[k];
        out.push((plus - minus) / 2.0);
    }
    Ok(out)
}

/// The cost of a [`TaskSpec`] under a noise model.
#[derive(Debug, Clone)]
pub struct VqeObjective {
    pub task: TaskSpec,
    pub noise: NoiseSpec,
}

impl VqeObjective {
    pub fn new(task: TaskSpec, noise: NoiseSpec) -> Self {
        Self { task, noise }
    }
}

impl Objective for VqeObjective {
    fn n_qubits(&self) -> usize {
        self.task.n_qubits()
    }

    fn evaluate(&self, path: &AnsatzPath, params: &[f64]) -> Result<f64> {
        let angles = encoded_angles(path, params, 0.0)?;
        self.task.evaluate_angles(path, &angles, &self.noise)
    }

    fn gradient_uncounted(&self, path: &AnsatzPath, params: &[f64]) -> Result<(Vec<f64>, u64)> {
        let angles = encoded_angles(path, params, 0.0)?;
        let d = shift_derivatives(&angles, |a| self.task.evaluate_angles(path, a, &self.noise))?;
        let evals = 2 * angles.len() as u64;
        Ok((chain_to_slots(path, &d, |_| 0.0), evals))
    }
}

/// Converts per-angle derivatives into per-slot derivatives, with `x` giving
/// the context value for rotation `k`.
pub(crate) fn chain_to_slots(path: &AnsatzPath, d_angle: &[f64], x: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(path.slot_count());
    let mut k = 0;
    for layer in path.layers() {
        for rot in layer.rotations().iter().flatten() {
            let w = rot.encoding.slot_weights(x(k));
            for s in 0..rot.encoding.slots() {
                out.push(w[s] * d_angle[k]);
            }
            k += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    PoolTraining,
    AlternateTraining,
    Retraining,
    Baseline,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::PoolTraining, Stage::AlternateTraining, Stage::Retraining, Stage::Baseline];

    fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Stage::PoolTraining => "pool",
            Stage::AlternateTraining => "alternate",
            Stage::Retraining => "retrain",
            Stage::Baseline => "baseline",
        }
    }
}

/// Why cost evaluations were spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Charge {
    Cost,
    Gradient,
    LineSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEvent {
    pub stage: Stage,
    pub charge: Charge,
    pub count: u64,
    /// Rotation count of the circuit involved (0 when not applicable).
    pub rotations: usize,
}

/// Counter of full cost evaluations with an event log. Safe to share
/// between threads; totals do not depend on scheduling.
#[derive(Debug)]
pub struct Ledger {
    total: AtomicU64,
    per_stage: [AtomicU64; 4],
    stage: Mutex<Stage>,
    events: Mutex<Vec<LedgerEvent>>,
}

impl Default for Ledger {
    fn default() -> Self {
        Self::new(Stage::Baseline)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub total: u64,
    pub pool_training: u64,
    pub alternate_training: u64,
    pub retraining: u64,
    pub baseline: u64,
}

impl Ledger {
    pub fn new(stage: Stage) -> Self {
        Self {
            total: AtomicU64::new(0),
            per_stage: Default::default(),
            stage: Mutex::new(stage),
            events: Mutex::new(Vec::new()),
        }
    }

    pub fn set_stage(&self, stage: Stage) {
        *self.stage.lock().expect("ledger lock") = stage;
    }

    pub fn stage(&self) -> Stage {
        *self.stage.lock().expect("ledger lock")
    }

    pub fn charge(&self, charge: Charge, count: u64) {
        self.charge_with(charge, count, 0);
    }

    pub fn charge_with(&self, charge: Charge, count: u64, rotations: usize) {
        if count == 0 {
            return;
        }
        let stage = self.stage();
        self.total.fetch_add(count, Ordering::SeqCst);
        self.per_stage[stage.index()].fetch_add(count, Ordering::SeqCst);
        self.events.lock().expect("ledger lock").push(LedgerEvent { stage, charge, count, rotations });
    }

    pub fn total(&self) -> u64 {
        self.total.load(Ordering::SeqCst)
    }

    pub fn stage_total(&self, stage: Stage) -> u64 {
        self.per_stage[stage.index()].load(Ordering::SeqCst)
    }

    pub fn events(&self) -> Vec<LedgerEvent> {
        self.events.lock().expect("ledger lock").clone()
    }

    pub fn summary(&self) -> LedgerSummary {
        LedgerSummary {
            total: self.total(),
            pool_training: self.stage_total(Stage::PoolTraining),
            alternate_training: self.stage_total(Stage::AlternateTraining),
            retraining: self.stage_total(Stage::Retraining),
            baseline: self.stage_total(Stage::Baseline),
        }
    }
}

pub fn cost(obj: &dyn Objective, path: &AnsatzPath, params: &[f64], ledger: &Ledger) -> Result<f64> {
    let c = obj.evaluate(path, params)?;
    ledger.charge_with(Charge::Cost, 1, path.rotation_count());
    Ok(c)
}

pub fn gradient(obj: &dyn Objective, path: &AnsatzPath, params: &[f64], ledger: &Ledger) -> Result<Vec<f64>> {
    let (g, evals) = obj.gradient_uncounted(path, params)?;
    ledger.charge_with(Charge::Gradient, evals, path.rotation_count());
    Ok(g)
}

/// `||grad||_2 / num_params`, zero when there are no parameters.
pub fn normalized_gradient_magnitude(grad: &[f64], num_params: usize) -> f64 {
    if num_params == 0 {
        return 0.0;
    }
    grad.iter().map(|g| g * g).sum::<f64>().sqrt() / num_params as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LineSearchConfig {
    pub alpha0: f64,
    pub c1: f64,
    pub shrink: f64,
    /// Trials beyond the first before giving up.
    pub max_backtracks: usize,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        Self { alpha0: 5.0, c1: 1e-4, shrink: 0.618, max_backtracks: 30 }
    }
}

impl LineSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0) {
            return Err(Error::Config("alpha0 must be positive".into()));
        }
        if !(self.c1 > 0.0 && self.c1 < 1.0) {
            return Err(Error::Config("c1 must lie in (0, 1)".into()));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::Config("shrink must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub params: Vec<f64>,
    /// Accepted step size, 0 when backtracking ran out.
    pub alpha: f64,
    /// Cost at the returned parameters.
    pub cost: f64,
    pub trials: u64,
}

/// First `alpha` in `alpha0 * shrink^k` with
/// `C(p - alpha g) <= C(p) - c1 alpha |g|^2`.
pub fn line_search_step(
    obj: &dyn Objective,
    path: &AnsatzPath,
    params: &[f64],
    grad: &[f64],
    current_cost: f64,
    cfg: &LineSearchConfig,
    ledger: &Ledger,
) -> Result<Step> {
    if grad.len() != params.len() {
        return Err(Error::ParameterMismatch { expected: params.len(), found: grad.len() });
    }
    let g2: f64 = grad.iter().map(|g| g * g).sum();
    let mut alpha = cfg.alpha0;
    let mut trials = 0;
    for _ in 0..=cfg.max_backtracks {
        let trial: Vec<f64> = params.iter().zip(grad).map(|(p, g)| p - alpha * g).collect();
        let c = obj.evaluate(path, &trial)?;
        trials += 1;
        if c <= current_cost - cfg.c1 * alpha * g2 {
            ledger.charge(Charge::LineSearch, trials);
            return Ok(Step { params: trial, alpha, cost: c, trials });
        }
        alpha *= cfg.shrink;
    }
    ledger.charge(Charge::LineSearch, trials);
    Ok(Step { params: params.to_vec(), alpha: 0.0, cost: current_cost, trials })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentConfig {
    pub line: LineSearchConfig,
    /// Stop once `alpha * |grad| / num_params` falls below this.
    pub xi: f64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentOutcome {
    pub params: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    pub termination: Termination,
}

/// Gradient descent with backtracking. Each iteration spends a gradient,
/// the line-search trials and one evaluation at the new point; the starting
/// cost is evaluated once up front. `on_cost` sees every evaluated cost
/// together with the ledger total after it.
pub fn descend(
    obj: &dyn Objective,
    path: &AnsatzPath,
    params: &[f64],
    cfg: &DescentConfig,
    ledger: &Ledger,
    mut on_cost: impl FnMut(u64, f64),
) -> Result<DescentOutcome> {
    let mut theta = params.to_vec();
    let mut c = cost(obj, path, &theta, ledger)?;
    on_cost(ledger.total(), c);
    if theta.is_empty() {
        return Ok(DescentOutcome { params: theta, cost: c, iterations: 0, termination: Termination::Converged });
    }
    for it in 0..cfg.max_iters {
        let g = gradient(obj, path, &theta, ledger)?;
        let step = line_search_step(obj, path, &theta, &g, c, &cfg.line, ledger)?;
        theta = step.params;
        c = cost(obj, path, &theta, ledger)?;
        on_cost(ledger.total(), c);
        if step.alpha * normalized_gradient_magnitude(&g, theta.len()) < cfg.xi {
            return Ok(DescentOutcome { params: theta, cost: c, iterations: it + 1, termination: Termination::Converged });
        }
    }
    Ok(DescentOutcome { params: theta, cost: c, iterations: cfg.max_iters, termination: Termination::IterationLimit })
}
