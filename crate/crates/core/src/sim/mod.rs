//! Dense density-matrix and statevector simulation of the {Ry, Rz, CNOT}
//! gate set with optional single-qubit depolarizing noise.

mod density;
mod gate;
mod noise;
mod statevector;

pub use density::DensityMatrix;
pub use gate::Gate;
pub use noise::NoiseSpec;
pub use statevector::StateVector;

/// Largest register the dense backends accept.
pub const MAX_QUBITS: usize = 8;

use crate::error::{Error, Result};

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        Err(Error::TooManyQubits { n, max: MAX_QUBITS })
    } else {
        Ok(())
    }
}

/// `U rho U^dagger`, followed by depolarization of every touched qubit when
/// `noise.enabled`.
pub fn apply_gate(state: &DensityMatrix, gate: &Gate, noise: &NoiseSpec) -> Result<DensityMatrix> {
    let mut out = state.clone();
    out.apply(gate, noise)?;
    Ok(out)
}
