//! Variable-ansatz VQE: a noisy density-matrix simulator, a pruned space of
//! layered circuits, a weight-sharing parameter pool and a gradient-aware
//! multi-objective genetic search, plus fixed and random baselines.

pub mod baselines;
pub mod circuit;
pub mod driver;
pub mod error;
pub mod gramo;
pub mod hamiltonian;
pub mod meta;
pub mod optimize;
pub mod pauli;
pub mod pool;
pub mod sim;
pub mod space;

pub use error::{Error, Result};
