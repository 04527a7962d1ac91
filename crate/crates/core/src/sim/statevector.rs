use num_complex::Complex64;

use super::check_qubits;
use super::gate::{qubit_bit, ry_matrix, rz_matrix};
use super::Gate;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Noiseless pure-state backend, used to cross-check the density-matrix path.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n)?;
        match *gate {
            Gate::Ry { qubit, angle } => self.apply_single(qubit, ry_matrix(angle)),
            Gate::Rz { qubit, angle } => self.apply_single(qubit, rz_matrix(angle)),
            Gate::Cnot { control, target } => {
                let cm = qubit_bit(self.n, control);
                let tm = qubit_bit(self.n, target);
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
        }
        Ok(())
    }

    fn apply_single(&mut self, qubit: usize, u: [[Complex64; 2]; 2]) {
        let m = qubit_bit(self.n, qubit);
        for i0 in 0..self.amps.len() {
            if i0 & m != 0 {
                continue;
            }
            let i1 = i0 | m;
            let (a, b) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = u[0][0] * a + u[0][1] * b;
            self.amps[i1] = u[1][0] * a + u[1][1] * b;
        }
    }

    pub fn expectation(&self, observable: &PauliSum) -> Result<f64> {
        if observable.n_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: observable.n_qubits() });
        }
        let mut total = 0.0;
        for term in observable.terms() {
            let act = term.word.action();
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.amps.len() {
                acc += self.amps[j ^ act.x].conj() * act.phase(j) * self.amps[j];
            }
            total += acc.re * term.coeff;
        }
        Ok(total)
    }
}
