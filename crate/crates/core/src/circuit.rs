//! Executing paths on the simulators.

use crate::error::{Error, Result};
use crate::sim::{DensityMatrix, Gate, NoiseSpec, StateVector};
use crate::space::{AnsatzPath, Axis};

/// Gate list of `path` with one angle per rotation, consumed layer by layer,
/// rotations by ascending qubit, then the layer's CNOTs.
pub fn circuit_gates(path: &AnsatzPath, angles: &[f64]) -> Result<Vec<Gate>> {
    let expected = path.rotation_count();
    if angles.len() != expected {
        return Err(Error::ParameterMismatch { expected, found: angles.len() });
    }
    let mut gates = Vec::with_capacity(expected + path.n_layers() * path.n_qubits() / 2);
    let mut k = 0;
    for layer in path.layers() {
        for (q, rot) in layer.rotations().iter().enumerate() {
            if let Some(rot) = rot {
                let angle = angles[k];
                k += 1;
                gates.push(match rot.axis {
                    Axis::Y => Gate::Ry { qubit: q, angle },
                    Axis::Z => Gate::Rz { qubit: q, angle },
                });
            }
        }
        for (control, target) in layer.cnots() {
            gates.push(Gate::Cnot { control, target });
        }
    }
    Ok(gates)
}

/// Rotation angles of `path` when every slot vector is evaluated at context
/// value `x`.
pub fn encoded_angles(path: &AnsatzPath, slots: &[f64], x: f64) -> Result<Vec<f64>> {
    let expected = path.slot_count();
    if slots.len() != expected {
        return Err(Error::ParameterMismatch { expected, found: slots.len() });
    }
    let mut out = Vec::with_capacity(path.rotation_count());
    let mut k = 0;
    for layer in path.layers() {
        for rot in layer.rotations().iter().flatten() {
            let s = rot.encoding.slots();
            out.push(rot.encoding.angle(&slots[k..k + s], x));
            k += s;
        }
    }
    Ok(out)
}

pub fn run_circuit(
    path: &AnsatzPath,
    angles: &[f64],
    input: &DensityMatrix,
    noise: &NoiseSpec,
) -> Result<DensityMatrix> {
    if input.n_qubits() != path.n_qubits() && path.n_layers() > 0 {
        return Err(Error::DimensionMismatch { expected: input.n_qubits(), found: path.n_qubits() });
    }
    let mut rho = input.clone();
    for g in circuit_gates(path, angles)? {
        rho.apply(&g, noise)?;
    }
    Ok(rho)
}

/// Noiseless statevector evolution of `|0...0>`.
pub fn run_circuit_pure(path: &AnsatzPath, angles: &[f64]) -> Result<StateVector> {
    let mut psi = StateVector::zero_state(path.n_qubits())?;
    for g in circuit_gates(path, angles)? {
        psi.apply(&g)?;
    }
    Ok(psi)
}
