//! Rewriting raw layer sequences into their constraint-valid representative.
//!
//! Rewrites, applied to a fixpoint:
//! * drop Rz and CNOTs whose control is still |0>;
//! * cancel a repeated CNOT when nothing between blocks it;
//! * merge a rotation into the preceding same-axis rotation on its wire
//!   (an Rz looks through CNOTs it controls);
//! * move each rotation to the earliest layer its wire allows;
//! * squeeze out empty layers.
//!
//! A valid path is left untouched.

use super::constraints::is_valid;
use super::layer::{AnsatzPath, Axis, Encoding, LayerState, Rotation};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Kind {
    Rot { q: usize, rot: Rotation, slots: Vec<f64> },
    Cx { c: usize, t: usize },
}

#[derive(Debug, Clone)]
struct Op {
    layer: usize,
    kind: Kind,
}

impl Op {
    fn order_key(&self) -> (usize, usize, usize) {
        match self.kind {
            Kind::Rot { q, .. } => (self.layer, 0, q),
            Kind::Cx { c, .. } => (self.layer, 1, c),
        }
    }

    fn touches(&self, q: usize) -> bool {
        match self.kind {
            Kind::Rot { q: r, .. } => r == q,
            Kind::Cx { c, t } => c == q || t == q,
        }
    }
}

/// Returns the canonical path (padded to `n_layers`) and its parameters.
pub fn canonicalize(
    n: usize,
    n_layers: usize,
    raw: &[LayerState],
    params: &[f64],
) -> Result<(AnsatzPath, Vec<f64>)> {
    let expected: usize = raw.iter().map(LayerState::slot_count).sum();
    if expected != params.len() {
        return Err(Error::ParameterMismatch { expected, found: params.len() });
    }
    let mut ops = Vec::new();
    let mut cursor = 0;
    for (l, state) in raw.iter().enumerate() {
        if state.n_qubits() != n {
            return Err(Error::DimensionMismatch { expected: n, found: state.n_qubits() });
        }
        for q in 0..n {
            if let Some(rot) = state.rotation(q) {
                let k = rot.encoding.slots();
                ops.push(Op { layer: l, kind: Kind::Rot { q, rot, slots: params[cursor..cursor + k].to_vec() } });
                cursor += k;
            }
        }
        for (c, t) in state.cnots() {
            ops.push(Op { layer: l, kind: Kind::Cx { c, t } });
        }
    }

    loop {
        let mut changed = drop_clean(&mut ops, n);
        changed |= cancel_cnots(&mut ops);
        changed |= merge_rotations(&mut ops);
        changed |= hoist_rotations(&mut ops);
        changed |= squeeze(&mut ops);
        if !changed {
            break;
        }
    }

    let depth = ops.iter().map(|o| o.layer + 1).max().unwrap_or(0);
    assert!(depth <= n_layers.max(raw.len()), "rewriting never deepens a circuit");
    if depth > n_layers {
        return Err(Error::Config(format!("raw sequence needs {depth} layers, limit is {n_layers}")));
    }
    let mut layers = vec![LayerState::empty(n); n_layers];
    for op in &ops {
        match &op.kind {
            Kind::Rot { q, rot, .. } => layers[op.layer].set_rotation(*q, Some(*rot)),
            Kind::Cx { c, .. } => {
                let mask = layers[op.layer].controls_mask() | (1 << c);
                layers[op.layer].set_controls(mask);
            }
        }
    }
    let out_params = ops
        .iter()
        .filter_map(|o| match &o.kind {
            Kind::Rot { slots, .. } => Some(slots.iter().copied()),
            Kind::Cx { .. } => None,
        })
        .flatten()
        .collect();
    let path = AnsatzPath::new(layers)?;
    debug_assert!(is_valid(&path), "canonical form violates constraints: {path}");
    Ok((path, out_params))
}

fn sort(ops: &mut [Op]) {
    ops.sort_by_key(Op::order_key);
}

fn drop_clean(ops: &mut Vec<Op>, n: usize) -> bool {
    let mut clean = (1u32 << n) - 1;
    let before = ops.len();
    ops.retain(|op| match op.kind {
        Kind::Rot { q, rot, .. } => match rot.axis {
            Axis::Y => {
                clean &= !(1 << q);
                true
            }
            Axis::Z => clean & (1 << q) == 0,
        },
        Kind::Cx { c, t } => {
            if clean & (1 << c) != 0 {
                false
            } else {
                clean &= !(1 << t);
                true
            }
        }
    });
    ops.len() != before
}

fn blocks(op: &Op, q1: usize, q2: usize) -> bool {
    match op.kind {
        Kind::Rot { q, rot, .. } => (q == q1 && rot.axis == Axis::Y) || q == q2,
        Kind::Cx { c, t } => (c, t) != (q1, q2) && (t == q1 || c == q2 || t == q2),
    }
}

fn cancel_cnots(ops: &mut Vec<Op>) -> bool {
    for j in 0..ops.len() {
        let Kind::Cx { c, t } = ops[j].kind else { continue };
        let earlier = (0..j).rev().find(|&i| matches!(ops[i].kind, Kind::Cx { c: c2, t: t2 } if (c2, t2) == (c, t)));
        if let Some(i) = earlier {
            if !ops[i + 1..j].iter().any(|op| blocks(op, c, t)) {
                ops.remove(j);
                ops.remove(i);
                return true;
            }
        }
    }
    false
}

/// Index of the gate on `q` that `ops[j]` must follow. An Rz commutes with
/// CNOTs it controls.
fn wire_predecessor(ops: &[Op], j: usize, q: usize, axis: Axis) -> Option<usize> {
    (0..j).rev().find(|&i| {
        let op = &ops[i];
        if !op.touches(q) {
            return false;
        }
        !(axis == Axis::Z && matches!(op.kind, Kind::Cx { c, .. } if c == q))
    })
}

/// Folds `(b_enc, b)` into `(a_enc, a)`; `None` when no single encoding
/// represents the sum.
fn fold(a_enc: Encoding, a: &[f64], b_enc: Encoding, b: &[f64]) -> Option<(Encoding, Vec<f64>)> {
    if a_enc == b_enc {
        return Some((a_enc, a.iter().zip(b).map(|(x, y)| x + y).collect()));
    }
    match (a_enc, b_enc) {
        (Encoding::Direct, other) => Some((other, vec![b[0], b[1] + a[0]])),
        (other, Encoding::Direct) => Some((other, vec![a[0], a[1] + b[0]])),
        _ => None,
    }
}

fn merge_rotations(ops: &mut Vec<Op>) -> bool {
    for j in 0..ops.len() {
        let Kind::Rot { q, rot, .. } = ops[j].kind else { continue };
        let Some(i) = wire_predecessor(ops, j, q, rot.axis) else { continue };
        let Kind::Rot { rot: prev, .. } = ops[i].kind else { continue };
        if prev.axis != rot.axis {
            continue;
        }
        let later = ops.remove(j);
        let Kind::Rot { slots: b, .. } = later.kind else { unreachable!() };
        if let Kind::Rot { rot: ref mut pr, ref mut slots, .. } = ops[i].kind {
            // Incompatible encodings: the later gate is discarded.
            if let Some((enc, merged)) = fold(pr.encoding, slots, rot.encoding, &b) {
                pr.encoding = enc;
                *slots = merged;
            }
        }
        return true;
    }
    false
}

fn hoist_rotations(ops: &mut Vec<Op>) -> bool {
    let mut changed = false;
    for j in 0..ops.len() {
        let Kind::Rot { q, rot, .. } = ops[j].kind else { continue };
        let target = match wire_predecessor(ops, j, q, rot.axis) {
            Some(i) => ops[i].layer + 1,
            None => 0,
        };
        if target < ops[j].layer {
            ops[j].layer = target;
            changed = true;
        }
    }
    if changed {
        sort(ops);
    }
    changed
}

fn squeeze(ops: &mut [Op]) -> bool {
    let mut used: Vec<usize> = ops.iter().map(|o| o.layer).collect();
    used.sort_unstable();
    used.dedup();
    let mut changed = false;
    for op in ops.iter_mut() {
        let new = used.binary_search(&op.layer).expect("layer present");
        if new != op.layer {
            op.layer = new;
            changed = true;
        }
    }
    changed
}
