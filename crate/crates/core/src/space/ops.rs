//! Asexual genetic operators on paths.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::canon::canonicalize;
use super::layer::{AnsatzPath, LayerState};
use super::StateSpace;

/// Bound on redraws when an operator leaves the canonical path unchanged.
pub const MAX_OPERATOR_RETRIES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneticOperator {
    Mutation,
    Deletion,
    Amplification,
}

impl GeneticOperator {
    pub const ALL: [GeneticOperator; 3] =
        [GeneticOperator::Mutation, GeneticOperator::Deletion, GeneticOperator::Amplification];

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::ALL[rng.gen_range(0..3)]
    }
}

/// An edited layer sequence before canonicalization. `origin[i]` is the
/// parent layer copied into position `i`, or `None` for a new state.
#[derive(Debug, Clone, PartialEq)]
pub struct RawOffspring {
    pub op: GeneticOperator,
    pub layers: Vec<LayerState>,
    pub origin: Vec<Option<usize>>,
}

/// One raw edit of `path`. Deletion of a path without non-empty layers
/// returns `None`.
pub fn propose<R: Rng + ?Sized>(
    space: &StateSpace,
    path: &AnsatzPath,
    op: GeneticOperator,
    rng: &mut R,
) -> Option<RawOffspring> {
    let n_layers = path.n_layers();
    let n = path.n_qubits();
    let mut layers = path.layers().to_vec();
    let mut origin: Vec<Option<usize>> = (0..n_layers).map(Some).collect();
    match op {
        GeneticOperator::Mutation => {
            let l = rng.gen_range(0..n_layers);
            let state = loop {
                let s = space.random_state(rng);
                if s != layers[l] {
                    break s;
                }
            };
            layers[l] = state;
            origin[l] = None;
        }
        GeneticOperator::Deletion => {
            let filled: Vec<usize> = (0..n_layers).filter(|&l| !layers[l].is_empty()).collect();
            if filled.is_empty() {
                return None;
            }
            let l = filled[rng.gen_range(0..filled.len())];
            layers.remove(l);
            origin.remove(l);
            layers.push(LayerState::empty(n));
            origin.push(None);
        }
        GeneticOperator::Amplification => {
            let filled = layers.iter().filter(|s| !s.is_empty()).count();
            let at = rng.gen_range(0..=filled.min(n_layers - 1));
            layers.insert(at, space.random_state(rng));
            origin.insert(at, None);
            layers.truncate(n_layers);
            origin.truncate(n_layers);
        }
    }
    Some(RawOffspring { op, layers, origin })
}

/// Applies `op` and canonicalizes, redrawing while the result equals the
/// input (at most [`MAX_OPERATOR_RETRIES`] times).
pub fn apply_operator<R: Rng + ?Sized>(
    space: &StateSpace,
    path: &AnsatzPath,
    op: GeneticOperator,
    rng: &mut R,
) -> AnsatzPath {
    for _ in 0..MAX_OPERATOR_RETRIES {
        let Some(raw) = propose(space, path, op, rng) else { break };
        let slots: usize = raw.layers.iter().map(LayerState::slot_count).sum();
        let (child, _) = canonicalize(path.n_qubits(), path.n_layers(), &raw.layers, &vec![0.0; slots])
            .expect("raw offspring is well formed");
        if &child != path {
            return child;
        }
    }
    path.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{is_valid, SpaceConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deleting_the_only_layer_gives_empty() {
        let space = StateSpace::new(SpaceConfig::new(4, 3)).unwrap();
        let path = AnsatzPath::parse(4, "q0:Ry q1:Ry cx:0>1\n-\n-").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = apply_operator(&space, &path, GeneticOperator::Deletion, &mut rng);
        assert!(out.is_empty());
    }

    #[test]
    fn amplifying_empty_gives_one_layer() {
        let space = StateSpace::new(SpaceConfig::new(4, 3)).unwrap();
        let empty = AnsatzPath::empty(4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let raw = propose(&space, &empty, GeneticOperator::Amplification, &mut rng).unwrap();
            let slots: usize = raw.layers.iter().map(LayerState::slot_count).sum();
            let (child, _) = canonicalize(4, 3, &raw.layers, &vec![0.0; slots]).unwrap();
            let (alone, _) = canonicalize(4, 3, &raw.layers[..1], &vec![0.0; raw.layers[0].slot_count()]).unwrap();
            assert_eq!(child, alone);
            assert!(child.layers()[1..].iter().all(LayerState::is_empty));
        }
    }

    #[test]
    fn offspring_are_valid() {
        let space = StateSpace::new(SpaceConfig::new(4, 3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let p = space.sample_uniform(&mut rng);
            let op = GeneticOperator::random(&mut rng);
            assert!(is_valid(&apply_operator(&space, &p, op, &mut rng)));
        }
    }
}
