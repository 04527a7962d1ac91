//! Training one encoded circuit across a family of Hamiltonians `H(x)`.

use std::path::Path;

use crate::circuit::encoded_angles;
use crate::error::{Error, Result};
use crate::hamiltonian::{builtin_hamiltonian, load_hamiltonian};
use crate::optimize::{chain_to_slots, shift_derivatives, Charge, Ledger, Objective, TaskSpec};
use crate::pauli::PauliSum;
use crate::sim::NoiseSpec;
use crate::space::AnsatzPath;

/// Sampled points `(x, H(x))` of a parameterized Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianFamily {
    points: Vec<(f64, PauliSum)>,
}

impl HamiltonianFamily {
    pub fn new(points: Vec<(f64, PauliSum)>) -> Result<Self> {
        let n = points.first().map(|p| p.1.n_qubits()).ok_or_else(|| Error::Empty("family has no points".into()))?;
        for (_, h) in &points {
            if h.n_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, found: h.n_qubits() });
            }
        }
        Ok(Self { points })
    }

    pub fn from_fn(xs: &[f64], mut generator: impl FnMut(f64) -> Result<PauliSum>) -> Result<Self> {
        Self::new(xs.iter().map(|&x| Ok((x, generator(x)?))).collect::<Result<_>>()?)
    }

    /// A builtin model with its first parameter swept over `xs`.
    pub fn builtin(name: &str, n: usize, xs: &[f64]) -> Result<Self> {
        Self::from_fn(xs, |x| builtin_hamiltonian(name, n, &[x]))
    }

    /// Lines of `x path`, relative paths resolved against the file's
    /// directory. `#` starts a comment.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(x), Some(file), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse { line: i + 1, message: "expected `x path`".into() });
            };
            let x: f64 = x.parse().map_err(|_| Error::Parse { line: i + 1, message: format!("bad value `{x}`") })?;
            points.push((x, load_hamiltonian(&base.join(file))?));
        }
        Self::new(points)
    }

    pub fn n_qubits(&self) -> usize {
        self.points[0].1.n_qubits()
    }

    pub fn points(&self) -> &[(f64, PauliSum)] {
        &self.points
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    /// The points whose `x` appears in `xs`.
    pub fn subset(&self, xs: &[f64]) -> Result<Self> {
        let mut out = Vec::new();
        for &x in xs {
            let p = self
                .points
                .iter()
                .find(|p| p.0 == x)
                .ok_or_else(|| Error::Config(format!("no family point at {x}")))?;
            out.push(p.clone());
        }
        Self::new(out)
    }
}

/// Sum over training points of the energy with angles encoded at each `x`.
/// One evaluation runs every point; a gradient shifts each rotation both
/// ways and weights the per-point derivatives by the encoding slope.
#[derive(Debug, Clone)]
pub struct MetaObjective {
    tasks: Vec<(f64, TaskSpec)>,
    noise: NoiseSpec,
}

impl MetaObjective {
    pub fn new(training: &HamiltonianFamily, noise: NoiseSpec) -> Result<Self> {
        let tasks = training
            .points()
            .iter()
            .map(|(x, h)| Ok((*x, TaskSpec::ground_state(h.clone())?)))
            .collect::<Result<_>>()?;
        Ok(Self { tasks, noise })
    }

    /// Energy at each training point.
    pub fn per_point(&self, path: &AnsatzPath, params: &[f64]) -> Result<Vec<f64>> {
        self.tasks
            .iter()
            .map(|(x, task)| task.evaluate_angles(path, &encoded_angles(path, params, *x)?, &self.noise))
            .collect()
    }
}

impl Objective for MetaObjective {
    fn n_qubits(&self) -> usize {
        self.tasks[0].1.n_qubits()
    }

    fn evaluate(&self, path: &AnsatzPath, params: &[f64]) -> Result<f64> {
        Ok(self.per_point(path, params)?.iter().sum())
    }

    fn gradient_uncounted(&self, path: &AnsatzPath, params: &[f64]) -> Result<(Vec<f64>, u64)> {
        let mut grad = vec![0.0; params.len()];
        for (x, task) in &self.tasks {
            let angles = encoded_angles(path, params, *x)?;
            let d = shift_derivatives(&angles, |a| task.evaluate_angles(path, a, &self.noise))?;
            for (g, v) in grad.iter_mut().zip(chain_to_slots(path, &d, |_| *x)) {
                *g += v;
            }
        }
        Ok((grad, 2 * path.rotation_count() as u64))
    }
}

/// Training cost, charged as one evaluation.
pub fn meta_cost(obj: &MetaObjective, path: &AnsatzPath, params: &[f64], ledger: &Ledger) -> Result<f64> {
    let c = obj.evaluate(path, params)?;
    ledger.charge_with(Charge::Cost, 1, path.rotation_count());
    Ok(c)
}

/// Energy of the trained circuit at every grid point, one charge each.
pub fn profile(
    grid: &HamiltonianFamily,
    path: &AnsatzPath,
    params: &[f64],
    noise: &NoiseSpec,
    ledger: &Ledger,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(grid.points().len());
    for (x, h) in grid.points() {
        let task = TaskSpec::ground_state(h.clone())?;
        let e = task.evaluate_angles(path, &encoded_angles(path, params, *x)?, noise)?;
        ledger.charge_with(Charge::Cost, 1, path.rotation_count());
        out.push((*x, e));
    }
    Ok(out)
}
