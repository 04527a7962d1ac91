//! Text ingestion of Pauli-sum observables, ring-model built-ins, and exact
//! ground energies by dense diagonalization.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliSum, PauliWord};
use crate::sim::MAX_QUBITS;

/// Parses `<coefficient> <word>` lines. `#` starts a comment.
pub fn parse_hamiltonian(text: &str) -> Result<PauliSum> {
    let mut terms = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `<coefficient> <pauli word>`, got `{line}`"),
            });
        }
        let coeff: f64 = fields[0].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("`{}` is not a real coefficient", fields[0]),
        })?;
        if !coeff.is_finite() {
            return Err(Error::Parse { line: line_no, message: "non-finite coefficient".into() });
        }
        let word = PauliWord::parse(fields[1]).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("`{}` is not a word over I, X, Y, Z", fields[1]),
        })?;
        if word.is_empty() {
            return Err(Error::Parse { line: line_no, message: "empty pauli word".into() });
        }
        match width {
            None => width = Some(word.len()),
            Some(w) if w != word.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("word length {} differs from earlier length {w}", word.len()),
                })
            }
            _ => {}
        }
        terms.push((coeff, word));
    }
    let n = width.ok_or_else(|| Error::Empty("hamiltonian text has no terms".into()))?;
    PauliSum::from_terms(n, terms)
}

pub fn load_hamiltonian(path: &Path) -> Result<PauliSum> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_hamiltonian(&text)
}

/// Distinct undirected ring bonds; a 2-ring has a single bond.
fn ring_bonds(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|q| (q, (q + 1) % n)).collect(),
    }
}

fn two_site(n: usize, a: usize, b: usize, p: Pauli) -> PauliWord {
    let mut letters = vec![Pauli::I; n];
    letters[a] = p;
    letters[b] = p;
    PauliWord::new(letters)
}

/// Ring-coupled model Hamiltonians.
///
/// * `tfim`: `-sum ZZ - g sum X`, params `[g]` (default `g = 1`).
/// * `heisenberg`: `J sum (XX + YY + ZZ)`, params `[J]` (default `J = 1`).
pub fn builtin_hamiltonian(name: &str, n: usize, params: &[f64]) -> Result<PauliSum> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
    }
    let mut terms = Vec::new();
    match name {
        "tfim" => {
            let g = params.first().copied().unwrap_or(1.0);
            for (a, b) in ring_bonds(n) {
                terms.push((-1.0, two_site(n, a, b, Pauli::Z)));
            }
            for q in 0..n {
                terms.push((-g, PauliWord::single(n, q, Pauli::X)));
            }
        }
        "heisenberg" => {
            let j = params.first().copied().unwrap_or(1.0);
            for (a, b) in ring_bonds(n) {
                for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                    terms.push((j, two_site(n, a, b, p)));
                }
            }
        }
        other => return Err(Error::UnknownHamiltonian(other.to_string())),
    }
    PauliSum::from_terms(n, terms)
}

/// Smallest eigenvalue of the dense matrix of `h`.
pub fn exact_ground_energy(h: &PauliSum) -> Result<f64> {
    let n = h.n_qubits();
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
    }
    let dim = 1usize << n;
    let dense = h.to_dense();
    let m = DMatrix::from_fn(dim, dim, |i, j| dense[i * dim + j]);
    Ok(m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min))
}
