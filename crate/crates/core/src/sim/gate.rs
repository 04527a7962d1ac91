use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Native gates of a ring-connected register.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    /// Only `target == (control + 1) % n` is available.
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => {
                if qubit >= n {
                    return Err(Error::QubitOutOfRange { index: qubit, n });
                }
            }
            Gate::Cnot { control, target } => {
                for index in [control, target] {
                    if index >= n {
                        return Err(Error::QubitOutOfRange { index, n });
                    }
                }
                if n < 2 || target != (control + 1) % n {
                    return Err(Error::NonAdjacentCnot { control, target, n });
                }
            }
        }
        Ok(())
    }

    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } => (qubit, None),
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }
}

pub(crate) type Mat2 = [[Complex64; 2]; 2];

pub(crate) fn ry_matrix(angle: f64) -> Mat2 {
    let (s, c) = (angle / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

pub(crate) fn rz_matrix(angle: f64) -> Mat2 {
    let half = angle / 2.0;
    [
        [Complex64::from_polar(1.0, -half), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, half)],
    ]
}

/// Bit of a basis index that carries qubit `q` (qubit 0 is most significant).
#[inline]
pub(crate) fn qubit_bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}
