//! Weight-sharing parameter pool and the candidate tree of trained paths.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{AnsatzPath, LayerState, StateSpace};

/// One parameter vector per (layer state, layer index), zero until written.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParameterPool {
    entries: HashMap<(LayerState, usize), Vec<f64>>,
}

impl ParameterPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Entry for `state` at zero-based `layer`.
    pub fn entry(&self, state: &LayerState, layer: usize) -> Vec<f64> {
        self.entries
            .get(&(state.clone(), layer))
            .cloned()
            .unwrap_or_else(|| vec![0.0; state.slot_count()])
    }

    /// Concatenated layer entries of `path`.
    pub fn lookup(&self, path: &AnsatzPath) -> Vec<f64> {
        let mut out = Vec::with_capacity(path.slot_count());
        for (l, s) in path.layers().iter().enumerate() {
            out.extend(self.entry(s, l));
        }
        out
    }

    /// Writes each layer slice of `params` back to its entry.
    pub fn update(&mut self, path: &AnsatzPath, params: &[f64]) -> Result<()> {
        let offsets = path.slot_offsets();
        let expected = *offsets.last().unwrap_or(&0);
        if params.len() != expected {
            return Err(Error::ParameterMismatch { expected, found: params.len() });
        }
        for (l, s) in path.layers().iter().enumerate() {
            if s.slot_count() > 0 {
                self.entries.insert((s.clone(), l), params[offsets[l]..offsets[l + 1]].to_vec());
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    children: BTreeMap<LayerState, usize>,
    leaf_count: u64,
    train_count: u64,
}

impl Node {
    fn new() -> Self {
        Self { children: BTreeMap::new(), leaf_count: 0, train_count: 0 }
    }
}

/// Prefix tree of trained paths with leaf and training counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateTree {
    depth: usize,
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig {
    /// Probability of walking the tree instead of sampling the space.
    pub epsilon1: f64,
    /// Probability of count-weighted (rather than leaf-uniform) walking.
    pub epsilon2: f64,
}

impl GreedyConfig {
    pub fn validate(&self) -> Result<()> {
        for e in [self.epsilon1, self.epsilon2] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::Config(format!("greedy probability {e} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Where a sampled path came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    Tree,
    Space,
}

impl CandidateTree {
    pub fn new(depth: usize) -> Self {
        Self { depth, nodes: vec![Node::new()] }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaf_count(&self) -> u64 {
        self.nodes[0].leaf_count
    }

    pub fn root_train_count(&self) -> u64 {
        self.nodes[0].train_count
    }

    fn find(&self, prefix: &[LayerState]) -> Option<usize> {
        let mut node = 0;
        for s in prefix {
            node = *self.nodes[node].children.get(s)?;
        }
        Some(node)
    }

    /// `(leaf count, training count)` of the node reached by `prefix`.
    pub fn counts(&self, prefix: &[LayerState]) -> Option<(u64, u64)> {
        self.find(prefix).map(|i| (self.nodes[i].leaf_count, self.nodes[i].train_count))
    }

    /// Records one training of `path`.
    pub fn insert(&mut self, path: &AnsatzPath) -> Result<()> {
        if path.n_layers() != self.depth {
            return Err(Error::Config(format!(
                "path has {} layers, tree expects {}",
                path.n_layers(),
                self.depth
            )));
        }
        let mut trail = vec![0usize];
        let mut node = 0;
        let mut created_leaf = false;
        for (l, s) in path.layers().iter().enumerate() {
            node = match self.nodes[node].children.get(s) {
                Some(&child) => child,
                None => {
                    let child = self.nodes.len();
                    self.nodes.push(Node::new());
                    self.nodes[node].children.insert(s.clone(), child);
                    if l + 1 == self.depth {
                        created_leaf = true;
                    }
                    child
                }
            };
            trail.push(node);
        }
        if self.depth == 0 && self.nodes[0].leaf_count == 0 {
            created_leaf = true;
        }
        for &i in &trail {
            if created_leaf {
                self.nodes[i].leaf_count += 1;
            }
            self.nodes[i].train_count += 1;
        }
        Ok(())
    }

    /// Walks from the root choosing children with weight `c_l + eta * c_t`.
    pub fn walk<R: Rng + ?Sized>(&self, eta: u64, rng: &mut R) -> Option<AnsatzPath> {
        if self.leaf_count() == 0 {
            return None;
        }
        let mut node = 0;
        let mut layers = Vec::with_capacity(self.depth);
        for _ in 0..self.depth {
            let weights: Vec<(&LayerState, usize, u64)> = self.nodes[node]
                .children
                .iter()
                .map(|(s, &c)| (s, c, self.nodes[c].leaf_count + eta * self.nodes[c].train_count))
                .collect();
            let total: u64 = weights.iter().map(|w| w.2).sum();
            let mut pick = rng.gen_range(0..total);
            let (s, c, _) = *weights
                .iter()
                .find(|w| {
                    if pick < w.2 {
                        true
                    } else {
                        pick -= w.2;
                        false
                    }
                })
                .expect("pick below total");
            layers.push(s.clone());
            node = c;
        }
        Some(AnsatzPath::new(layers).expect("stored layers are valid"))
    }

    /// Child selection probabilities at `prefix` for a given `eta`.
    pub fn child_probabilities(&self, prefix: &[LayerState], eta: u64) -> Vec<(LayerState, f64)> {
        let Some(node) = self.find(prefix) else { return Vec::new() };
        let w: Vec<(LayerState, u64)> = self.nodes[node]
            .children
            .iter()
            .map(|(s, &c)| (s.clone(), self.nodes[c].leaf_count + eta * self.nodes[c].train_count))
            .collect();
        let total: u64 = w.iter().map(|x| x.1).sum();
        w.into_iter().map(|(s, x)| (s, x as f64 / total as f64)).collect()
    }

    /// Double epsilon-greedy draw.
    pub fn sample_path<R: Rng + ?Sized>(
        &self,
        space: &StateSpace,
        cfg: &GreedyConfig,
        rng: &mut R,
    ) -> (AnsatzPath, Source) {
        if self.leaf_count() > 0 && rng.gen::<f64>() < cfg.epsilon1 {
            let eta = u64::from(rng.gen::<f64>() < cfg.epsilon2);
            if let Some(p) = self.walk(eta, rng) {
                return (p, Source::Tree);
            }
        }
        (space.sample_uniform(rng), Source::Space)
    }

    /// Every stored prefix with its counts, parents before children.
    pub fn nodes(&self) -> Vec<(Vec<LayerState>, u64, u64)> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((i, prefix)) = stack.pop() {
            let node = &self.nodes[i];
            for (s, &c) in node.children.iter().rev() {
                let mut p = prefix.clone();
                p.push(s.clone());
                stack.push((c, p));
            }
            out.push((prefix, node.leaf_count, node.train_count));
        }
        out
    }

    /// Checks `c_l(v) = sum c_l(children)` and unit leaves.
    pub fn is_consistent(&self) -> bool {
        self.nodes.iter().enumerate().all(|(i, n)| {
            let depth = self.depth_of(i);
            if depth == self.depth {
                n.children.is_empty() && n.leaf_count == 1
            } else if i == 0 && n.children.is_empty() {
                n.leaf_count == 0
            } else {
                n.leaf_count == n.children.values().map(|&c| self.nodes[c].leaf_count).sum::<u64>()
            }
        })
    }

    fn depth_of(&self, target: usize) -> usize {
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, d)) = stack.pop() {
            if i == target {
                return d;
            }
            for &c in self.nodes[i].children.values() {
                stack.push((c, d + 1));
            }
        }
        usize::MAX
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolEntryRecord {
    pub state: String,
    pub layer: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNodeRecord {
    pub prefix: Vec<String>,
    pub leaf_count: u64,
    pub train_count: u64,
}

/// Serializable snapshot of a pool and a tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n_qubits: usize,
    pub depth: usize,
    pub pool: Vec<PoolEntryRecord>,
    pub tree: Vec<TreeNodeRecord>,
}

impl Checkpoint {
    pub fn capture(n_qubits: usize, pool: &ParameterPool, tree: &CandidateTree) -> Self {
        let mut entries: Vec<PoolEntryRecord> = pool
            .entries
            .iter()
            .map(|((s, l), v)| PoolEntryRecord { state: s.to_string(), layer: *l, values: v.clone() })
            .collect();
        entries.sort_by(|a, b| (a.layer, &a.state).cmp(&(b.layer, &b.state)));
        let tree_nodes = tree
            .nodes()
            .into_iter()
            .map(|(prefix, leaf_count, train_count)| TreeNodeRecord {
                prefix: prefix.iter().map(|s| s.to_string()).collect(),
                leaf_count,
                train_count,
            })
            .collect();
        Self { n_qubits, depth: tree.depth, pool: entries, tree: tree_nodes }
    }

    pub fn restore(&self) -> Result<(ParameterPool, CandidateTree)> {
        let mut pool = ParameterPool::new();
        for e in &self.pool {
            let s = LayerState::parse(self.n_qubits, &e.state)?;
            if s.slot_count() != e.values.len() {
                return Err(Error::ParameterMismatch { expected: s.slot_count(), found: e.values.len() });
            }
            pool.entries.insert((s, e.layer), e.values.clone());
        }
        let mut tree = CandidateTree::new(self.depth);
        for rec in &self.tree {
            let prefix = rec
                .prefix
                .iter()
                .map(|s| LayerState::parse(self.n_qubits, s))
                .collect::<Result<Vec<_>>>()?;
            let idx = match prefix.split_last() {
                None => 0,
                Some((last, parent)) => {
                    let p = tree
                        .find(parent)
                        .ok_or_else(|| Error::Config("checkpoint lists a child before its parent".into()))?;
                    let child = tree.nodes.len();
                    tree.nodes.push(Node::new());
                    tree.nodes[p].children.insert(last.clone(), child);
                    child
                }
            };
            tree.nodes[idx].leaf_count = rec.leaf_count;
            tree.nodes[idx].train_count = rec.train_count;
        }
        Ok((pool, tree))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(text: &str) -> AnsatzPath {
        AnsatzPath::parse(3, text).unwrap()
    }

    #[test]
    fn lookup_is_direct_sum() {
        let mut pool = ParameterPool::new();
        assert!(pool.lookup(&AnsatzPath::empty(3, 2)).is_empty());
        let a = path("q0:Ry q1:Ry\nq0:Rz");
        pool.update(&a, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(pool.lookup(&a), vec![0.1, 0.2, 0.3]);
        let b = path("q0:Ry q2:Ry\nq0:Rz");
        assert_eq!(pool.lookup(&b), vec![0.0, 0.0, 0.3]);
        let c = path("q0:Rz\nq0:Ry q1:Ry");
        assert_eq!(pool.lookup(&c), vec![0.0, 0.0, 0.0]);
        assert!(pool.update(&a, &[1.0]).is_err());
    }

    #[test]
    fn insert_counts() {
        let mut tree = CandidateTree::new(2);
        let a = path("q0:Ry\n-");
        tree.insert(&a).unwrap();
        assert_eq!(tree.leaf_count(), 1);
        assert_eq!(tree.counts(&a.layers()[..1]), Some((1, 1)));
        tree.insert(&a).unwrap();
        assert_eq!(tree.leaf_count(), 1);
        assert_eq!(tree.counts(a.layers()), Some((1, 2)));
        let b = path("q0:Ry\nq0:Rz");
        tree.insert(&b).unwrap();
        assert_eq!(tree.leaf_count(), 2);
        assert_eq!(tree.counts(&a.layers()[..1]), Some((2, 3)));
        assert_eq!(tree.root_train_count(), 3);
        assert!(tree.is_consistent());
    }

    #[test]
    fn eq21_probabilities() {
        // child x: two leaves, three trainings; child y: one leaf, one training
        let mut tree = CandidateTree::new(2);
        tree.insert(&path("q0:Ry\n-")).unwrap();
        tree.insert(&path("q0:Ry\nq0:Rz")).unwrap();
        tree.insert(&path("q0:Ry\n-")).unwrap();
        tree.insert(&path("q1:Ry\n-")).unwrap();
        let probs = tree.child_probabilities(&[], 1);
        assert_eq!(probs.len(), 2);
        let x = LayerState::parse(3, "q0:Ry").unwrap();
        let px = probs.iter().find(|p| p.0 == x).unwrap().1;
        assert!((px - 5.0 / 7.0).abs() < 1e-15);
        let probs0 = tree.child_probabilities(&[], 0);
        let px0 = probs0.iter().find(|p| p.0 == x).unwrap().1;
        assert!((px0 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut pool = ParameterPool::new();
        let mut tree = CandidateTree::new(2);
        for t in ["q0:Ry\n-", "q0:Ry q1:Ry cx:0>1\nq1:Rz", "q2:Ry\nq2:Rz"] {
            let p = path(t);
            pool.update(&p, &vec![0.5; p.slot_count()]).unwrap();
            tree.insert(&p).unwrap();
        }
        let cp = Checkpoint::capture(3, &pool, &tree);
        let json = serde_json::to_string(&cp).unwrap();
        let back: Checkpoint = serde_json::from_str(&json).unwrap();
        let (pool2, tree2) = back.restore().unwrap();
        assert_eq!(pool2, pool);
        assert_eq!(tree2.nodes(), tree.nodes());
    }
}
