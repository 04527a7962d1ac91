//! Non-dominated ranking on (cost, normalized gradient magnitude): lower cost
//! and larger gradient are preferred.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    pub cost: f64,
    pub grad_mag: f64,
}

impl Objectives {
    pub fn new(cost: f64, grad_mag: f64) -> Self {
        Self { cost, grad_mag }
    }
}

/// Strictly lower cost and no smaller gradient magnitude.
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    a.cost < b.cost && a.grad_mag >= b.grad_mag
}

/// Fronts of indices into the population, best first. Individuals beyond
/// `max_rank` fronts are left unranked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedFronts {
    pub fronts: Vec<Vec<usize>>,
}

impl RankedFronts {
    /// 1-based front of `index`, if ranked.
    pub fn rank_of(&self, index: usize) -> Option<usize> {
        self.fronts.iter().position(|f| f.contains(&index)).map(|r| r + 1)
    }

    /// Union of the first `k` fronts.
    pub fn top(&self, k: usize) -> Vec<usize> {
        self.fronts.iter().take(k).flatten().copied().collect()
    }
}

/// Iterated non-dominated peeling (domination counts, as in fast
/// non-dominated sorting). Indices within a front are ascending.
pub fn rank_fronts(population: &[Objectives], max_rank: usize) -> RankedFronts {
    let n = population.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(&population[i], &population[j]) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() && fronts.len() < max_rank {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    RankedFronts { fronts }
}
