use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{DescentConfig, LineSearchConfig};
use crate::pool::GreedyConfig;

/// Hyperparameters of the three-stage search. Defaults reproduce the
/// reference setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GsaConfig {
    /// Maximum number of layers.
    pub layers: usize,
    pub alpha0: f64,
    pub c1: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
    /// Convergence / elimination threshold on `alpha * |grad| / |theta|`.
    pub xi: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    /// Warm-up iterations of pool training with a ramped tree probability.
    pub warmup_iterations: usize,
    /// Main pool-training iterations.
    pub pool_iterations: usize,
    /// Paths sampled per pool-training iteration.
    pub pool_samples: usize,
    /// Fronts trained per pool-training iteration.
    pub pool_ranks: usize,
    /// Iterations without a new tree leaf before pool training stops.
    pub pool_patience: usize,
    /// Population size of alternate training (even).
    pub population: usize,
    /// Fronts trained per generation.
    pub train_ranks: usize,
    /// Line-search steps per trained individual and generation.
    pub train_steps: usize,
    pub generations: usize,
    /// Generations with an unchanged recorded best before stopping.
    pub best_patience: usize,
    /// Iteration cap of the final retraining.
    pub retrain_iterations: usize,
    pub seed: u64,
}

impl Default for GsaConfig {
    fn default() -> Self {
        Self {
            layers: 3,
            alpha0: 5.0,
            c1: 1e-4,
            shrink: 0.618,
            max_backtracks: 30,
            xi: 0.003,
            epsilon1: 0.8,
            epsilon2: 0.8,
            warmup_iterations: 2,
            pool_iterations: 2,
            pool_samples: 16,
            pool_ranks: 1,
            pool_patience: 1,
            population: 16,
            train_ranks: 2,
            train_steps: 5,
            generations: 100,
            best_patience: 4,
            retrain_iterations: 10,
            seed: 0,
        }
    }
}

impl GsaConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("layers", self.layers),
            ("pool_iterations", self.pool_iterations),
            ("pool_samples", self.pool_samples),
            ("pool_ranks", self.pool_ranks),
            ("pool_patience", self.pool_patience),
            ("population", self.population),
            ("train_ranks", self.train_ranks),
            ("generations", self.generations),
            ("best_patience", self.best_patience),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if !self.population.is_multiple_of(2) {
            return Err(Error::Config("population must be even".into()));
        }
        if !(self.xi > 0.0) {
            return Err(Error::Config("xi must be positive".into()));
        }
        self.line_search().validate()?;
        self.greedy(self.epsilon1).validate()
    }

    pub fn line_search(&self) -> LineSearchConfig {
        LineSearchConfig {
            alpha0: self.alpha0,
            c1: self.c1,
            shrink: self.shrink,
            max_backtracks: self.max_backtracks,
        }
    }

    pub fn greedy(&self, epsilon1: f64) -> GreedyConfig {
        GreedyConfig { epsilon1, epsilon2: self.epsilon2 }
    }

    pub fn retraining(&self) -> DescentConfig {
        DescentConfig { line: self.line_search(), xi: self.xi, max_iters: self.retrain_iterations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        GsaConfig::default().validate().unwrap();
    }

    #[test]
    fn odd_population_rejected() {
        let cfg = GsaConfig { population: 5, ..GsaConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
