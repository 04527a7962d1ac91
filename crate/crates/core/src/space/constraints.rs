//! Cross-layer pruning rules, evaluated in circuit order (within a layer the
//! rotations precede the CNOTs).

use std::fmt;

use serde::{Deserialize, Serialize};

use super::layer::{AnsatzPath, Axis, LayerState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Rz or CNOT control acting on a qubit still in |0>.
    CleanQubit,
    /// A CNOT repeated on the same pair with nothing between that blocks
    /// cancellation.
    RepeatedCnot,
    /// Rz without an Ry or incoming CNOT on the qubit in the previous layer.
    UnanchoredRz,
    /// Ry (beyond the first layer) without Rz or a CNOT on the qubit in the
    /// previous layer.
    UnanchoredRy,
    /// A non-empty layer after an empty one.
    GapAfterEmpty,
}

impl Rule {
    pub fn number(self) -> u8 {
        match self {
            Rule::CleanQubit => 1,
            Rule::RepeatedCnot => 2,
            Rule::UnanchoredRz => 3,
            Rule::UnanchoredRy => 4,
            Rule::GapAfterEmpty => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    /// Zero-based layer index.
    pub layer: usize,
    pub qubit: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "constraint {} ({:?}) at layer {} on qubit {}", self.rule.number(), self.rule, self.layer + 1, self.qubit)
    }
}

/// Per-layer bit summaries (bit `q` for qubit `q`; CNOT edges indexed by
/// control qubit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LayerMasks {
    pub ry: u32,
    pub rz: u32,
    /// qubits targeted by a CNOT
    pub ct: u32,
    /// qubits controlling a CNOT (= CNOT edge mask)
    pub cc: u32,
    /// edges closed by this layer's rotations
    pub rot_block: u32,
    /// edges closed by this layer's CNOTs (excluding each CNOT's own edge)
    pub cnot_block: u32,
    pub empty: bool,
}

impl LayerMasks {
    pub fn of(state: &LayerState) -> Self {
        let n = state.n_qubits();
        let next = |q: usize| (q + 1) % n;
        let mut m = LayerMasks {
            ry: 0,
            rz: 0,
            ct: 0,
            cc: state.controls_mask(),
            rot_block: 0,
            cnot_block: 0,
            empty: state.is_empty(),
        };
        for q in 0..n {
            match state.rotation(q).map(|r| r.axis) {
                Some(Axis::Y) => m.ry |= 1 << q,
                Some(Axis::Z) => m.rz |= 1 << q,
                None => {}
            }
        }
        for (_, t) in state.cnots() {
            m.ct |= 1 << t;
        }
        for e in 0..n {
            let (q1, q2) = (e, next(e));
            if m.ry & (1 << q1) != 0 || (m.ry | m.rz) & (1 << q2) != 0 {
                m.rot_block |= 1 << e;
            }
            for (a, b) in state.cnots() {
                if a == q1 {
                    continue;
                }
                if b == q1 || a == q2 || b == q2 {
                    m.cnot_block |= 1 << e;
                }
            }
        }
        m
    }
}

/// Everything the rules need to know about the prefix scanned so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScanContext {
    /// Layers consumed so far.
    pub depth: usize,
    /// Qubits still provably |0>.
    pub clean: u32,
    /// CNOT edges whose last CNOT is not yet blocked.
    pub open: u32,
    /// Previous layer: qubits with Ry or incoming CNOT (anchors an Rz).
    pub anchors_rz: u32,
    /// Previous layer: qubits with Rz or any CNOT (anchors an Ry).
    pub anchors_ry: u32,
    pub prev_empty: bool,
}

impl ScanContext {
    pub fn start(n: usize) -> Self {
        Self {
            depth: 0,
            clean: (1u32 << n) - 1,
            open: 0,
            anchors_rz: 0,
            anchors_ry: 0,
            prev_empty: false,
        }
    }

    /// Key for memoization, omitting `depth`.
    pub fn key(&self) -> u64 {
        (self.clean as u64)
            | (self.open as u64) << 8
            | (self.anchors_rz as u64) << 16
            | (self.anchors_ry as u64) << 24
            | (self.prev_empty as u64) << 32
    }

    /// Consumes one layer, reporting each violation to `sink`.
    pub fn advance(&self, m: &LayerMasks, n: usize, mut sink: impl FnMut(Rule, usize)) -> ScanContext {
        let first = self.depth == 0;
        let each = |mask: u32, sink: &mut dyn FnMut(usize)| {
            for q in 0..n {
                if mask & (1 << q) != 0 {
                    sink(q);
                }
            }
        };
        if !first && self.prev_empty && !m.empty {
            sink(Rule::GapAfterEmpty, 0);
        }
        each(m.rz & self.clean, &mut |q| sink(Rule::CleanQubit, q));
        let unanchored_rz = if first { m.rz } else { m.rz & !self.anchors_rz };
        each(unanchored_rz, &mut |q| sink(Rule::UnanchoredRz, q));
        if !first {
            each(m.ry & !self.anchors_ry, &mut |q| sink(Rule::UnanchoredRy, q));
        }
        let clean = self.clean & !m.ry;
        each(m.cc & clean, &mut |q| sink(Rule::CleanQubit, q));
        let open = self.open & !m.rot_block;
        each(open & m.cc, &mut |q| sink(Rule::RepeatedCnot, q));
        let open = (open & !m.cnot_block) | m.cc;
        let mut dirtied = 0u32;
        for c in 0..n {
            if m.cc & (1 << c) != 0 && clean & (1 << c) == 0 {
                dirtied |= 1 << ((c + 1) % n);
            }
        }
        ScanContext {
            depth: self.depth + 1,
            clean: clean & !dirtied,
            open,
            anchors_rz: m.ry | m.ct,
            anchors_ry: m.rz | m.ct | m.cc,
            prev_empty: m.empty,
        }
    }

    /// `None` if the layer breaks any rule.
    pub fn try_advance(&self, m: &LayerMasks, n: usize) -> Option<ScanContext> {
        let mut ok = true;
        let next = self.advance(m, n, |_, _| ok = false);
        ok.then_some(next)
    }
}

/// All violations of `path`, in scan order. Empty means valid.
pub fn check_constraints(path: &AnsatzPath) -> Vec<Violation> {
    let n = path.n_qubits();
    let mut out = Vec::new();
    let mut ctx = ScanContext::start(n);
    for (layer, state) in path.layers().iter().enumerate() {
        let m = LayerMasks::of(state);
        ctx = ctx.advance(&m, n, |rule, qubit| out.push(Violation { rule, layer, qubit }));
    }
    out
}

pub fn is_valid(path: &AnsatzPath) -> bool {
    let n = path.n_qubits();
    let mut ctx = ScanContext::start(n);
    for state in path.layers() {
        match ctx.try_advance(&LayerMasks::of(state), n) {
            Some(next) => ctx = next,
            None => return false,
        }
    }
    true
}
