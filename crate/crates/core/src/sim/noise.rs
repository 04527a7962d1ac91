use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Depolarizing noise attached to gates: probability `p1` on the qubit of
/// every single-qubit gate, and independent channels with probability `p2` on
/// both qubits of every CNOT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub p1: f64,
    pub p2: f64,
    pub enabled: bool,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { p1: 0.001, p2: 0.01, enabled: true }
    }
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self { enabled: false, ..Self::default() }
    }

    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let spec = Self { p1, p2, enabled: true };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for p in [self.p1, self.p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("depolarizing probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_active(&self) -> bool {
        self.enabled && (self.p1 > 0.0 || self.p2 > 0.0)
    }
}
