use num_complex::Complex64;

use super::gate::{qubit_bit, ry_matrix, rz_matrix, Mat2};
use super::{check_qubits, Gate, NoiseSpec, StateVector};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major `2^n x 2^n` density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|0...0><0...0|`.
    pub fn zero_state(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1 << n;
        let mut data = vec![ZERO; dim * dim];
        data[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, dim, data })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1 << n;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n, dim, data })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let amps = psi.amplitudes();
        let dim = amps.len();
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = amps[i] * amps[j].conj();
            }
        }
        Self { n: psi.n_qubits(), dim, data }
    }

    /// Wraps raw row-major data. Only the shape is checked.
    pub fn from_raw(n: usize, data: Vec<Complex64>) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1 << n;
        if data.len() != dim * dim {
            return Err(Error::Config(format!(
                "density matrix data has {} entries, expected {}",
                data.len(),
                dim * dim
            )));
        }
        Ok(Self { n, dim, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        });
        m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Applies `gate` in place, then the attached depolarizing channels.
    pub fn apply(&mut self, gate: &Gate, noise: &NoiseSpec) -> Result<()> {
        gate.validate(self.n)?;
        match *gate {
            Gate::Ry { qubit, angle } => {
                self.conjugate_single(qubit, &ry_matrix(angle));
                if noise.enabled && noise.p1 > 0.0 {
                    self.depolarize(qubit, noise.p1);
                }
            }
            Gate::Rz { qubit, angle } => {
                self.conjugate_single(qubit, &rz_matrix(angle));
                if noise.enabled && noise.p1 > 0.0 {
                    self.depolarize(qubit, noise.p1);
                }
            }
            Gate::Cnot { control, target } => {
                self.conjugate_cnot(control, target);
                if noise.enabled && noise.p2 > 0.0 {
                    self.depolarize(control, noise.p2);
                    self.depolarize(target, noise.p2);
                }
            }
        }
        Ok(())
    }

    fn conjugate_single(&mut self, qubit: usize, u: &Mat2) {
        let dim = self.dim;
        let m = qubit_bit(self.n, qubit);
        // rows: rho <- U rho
        for i0 in (0..dim).filter(|i| i & m == 0) {
            let i1 = i0 | m;
            for c in 0..dim {
                let a = self.data[i0 * dim + c];
                let b = self.data[i1 * dim + c];
                self.data[i0 * dim + c] = u[0][0] * a + u[0][1] * b;
                self.data[i1 * dim + c] = u[1][0] * a + u[1][1] * b;
            }
        }
        // columns: rho <- rho U^dagger
        for r in 0..dim {
            let row = &mut self.data[r * dim..(r + 1) * dim];
            for j0 in (0..dim).filter(|j| j & m == 0) {
                let j1 = j0 | m;
                let a = row[j0];
                let b = row[j1];
                row[j0] = a * u[0][0].conj() + b * u[0][1].conj();
                row[j1] = a * u[1][0].conj() + b * u[1][1].conj();
            }
        }
    }

    fn conjugate_cnot(&mut self, control: usize, target: usize) {
        let dim = self.dim;
        let cm = qubit_bit(self.n, control);
        let tm = qubit_bit(self.n, target);
        let perm = |i: usize| if i & cm != 0 { i ^ tm } else { i };
        let old = self.data.clone();
        for i in 0..dim {
            let pi = perm(i);
            for j in 0..dim {
                self.data[i * dim + j] = old[pi * dim + perm(j)];
            }
        }
    }

    /// `rho -> (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z)` on one qubit,
    /// evaluated through `(1 - 4p/3) rho + (4p/3) (I/2 (x) Tr_q rho)`.
    fn depolarize(&mut self, qubit: usize, p: f64) {
        let dim = self.dim;
        let m = qubit_bit(self.n, qubit);
        let keep = 1.0 - 4.0 * p / 3.0;
        let mix = 2.0 * p / 3.0;
        for i0 in (0..dim).filter(|i| i & m == 0) {
            let i1 = i0 | m;
            for j0 in (0..dim).filter(|j| j & m == 0) {
                let j1 = j0 | m;
                let a = self.data[i0 * dim + j0];
                let d = self.data[i1 * dim + j1];
                let avg = (a + d) * mix;
                self.data[i0 * dim + j0] = a * keep + avg;
                self.data[i1 * dim + j1] = d * keep + avg;
                self.data[i0 * dim + j1] *= keep;
                self.data[i1 * dim + j0] *= keep;
            }
        }
    }

    /// `Tr[O rho]`, failing on a qubit-count mismatch or a non-negligible
    /// imaginary part.
    pub fn expectation(&self, observable: &PauliSum) -> Result<f64> {
        if observable.n_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: observable.n_qubits() });
        }
        let mut total = ZERO;
        for term in observable.terms() {
            let act = term.word.action();
            // Tr[P rho] = sum_j <j^x| P |j> rho[j, j^x]
            let mut acc = ZERO;
            for j in 0..self.dim {
                acc += act.phase(j) * self.data[j * self.dim + (j ^ act.x)];
            }
            total += acc * term.coeff;
        }
        let scale = 1.0 + observable.terms().iter().map(|t| t.coeff.abs()).sum::<f64>();
        debug_assert!(total.im.abs() <= 1e-8 * scale, "complex expectation {total}");
        Ok(total.re)
    }
}
