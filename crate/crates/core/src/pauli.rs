//! Pauli words and real-weighted Pauli sums.
//!
//! Qubit 0 is the leftmost letter of a word and the most significant bit of
//! a computational-basis index, so `"XI"` flips the high bit of a 2-qubit
//! index.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliWord(Vec<Pauli>);

impl PauliWord {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self(letters)
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![Pauli::I; n])
    }

    /// Single non-identity letter `p` on `qubit`.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[qubit] = p;
        Self(letters)
    }

    pub fn parse(s: &str) -> Option<Self> {
        s.chars().map(Pauli::from_char).collect::<Option<Vec<_>>>().map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    /// Bit masks (x, z) in the basis-index convention: bit `n-1-q` for qubit `q`.
    /// X sets x, Z sets z, Y sets both.
    pub fn masks(&self) -> (usize, usize) {
        let n = self.0.len();
        let mut x = 0;
        let mut z = 0;
        for (q, p) in self.0.iter().enumerate() {
            let bit = 1 << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                }
                Pauli::Z => z |= bit,
            }
        }
        (x, z)
    }

    pub fn y_count(&self) -> usize {
        self.0.iter().filter(|&&p| p == Pauli::Y).count()
    }

    /// Sparse action `P|j> = phase(j) |j ^ x>` as a closure-friendly triple.
    pub fn action(&self) -> PauliAction {
        let (x, z) = self.masks();
        let base = match self.y_count() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        PauliAction { x, z, base }
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// Precomputed sparse form of a Pauli word.
#[derive(Debug, Clone, Copy)]
pub struct PauliAction {
    pub x: usize,
    pub z: usize,
    base: Complex64,
}

impl PauliAction {
    /// Phase picked up by basis state `j`: `P|j> = phase(j) |j ^ x>`.
    #[inline]
    pub fn phase(&self, j: usize) -> Complex64 {
        if (j & self.z).count_ones() % 2 == 1 {
            -self.base
        } else {
            self.base
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub word: PauliWord,
}

/// A real linear combination of Pauli words on `n` qubits. Words are unique;
/// terms whose merged coefficient is exactly zero are dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    n: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn empty(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    /// Builds a sum, merging duplicate words. Fails on length mismatch or
    /// non-finite coefficients.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliWord)>,
    {
        let mut merged: BTreeMap<PauliWord, f64> = BTreeMap::new();
        let mut order: Vec<PauliWord> = Vec::new();
        for (coeff, word) in terms {
            if word.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: word.len() });
            }
            if !coeff.is_finite() {
                return Err(Error::Config(format!("non-finite coefficient for {word}")));
            }
            match merged.get_mut(&word) {
                Some(c) => *c += coeff,
                None => {
                    order.push(word.clone());
                    merged.insert(word, coeff);
                }
            }
        }
        let terms = order
            .into_iter()
            .filter_map(|word| {
                let coeff = merged[&word];
                (coeff != 0.0).then_some(PauliTerm { coeff, word })
            })
            .collect();
        Ok(Self { n, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm { coeff: t.coeff * factor, word: t.word.clone() })
                .collect(),
        }
    }

    /// Dense `2^n x 2^n` row-major matrix.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let dim = 1usize << self.n;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for term in &self.terms {
            let act = term.word.action();
            for j in 0..dim {
                let i = j ^ act.x;
                m[i * dim + j] += act.phase(j) * term.coeff;
            }
        }
        m
    }

    /// Text form accepted by [`crate::hamiltonian::parse_hamiltonian`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!("{:?} {}\n", t.coeff, t.word));
        }
        out
    }
}
