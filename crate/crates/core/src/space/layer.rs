use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::MAX_QUBITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    Y,
    Z,
}

/// Map from trainable slots (and a scalar context value `x`) to a gate angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Encoding {
    /// `angle = a`
    Direct,
    /// `angle = a * x + b`
    Linear,
    /// `angle = a * exp(x) + b`
    Exponential,
}

impl Encoding {
    pub const ALL: [Encoding; 3] = [Encoding::Direct, Encoding::Linear, Encoding::Exponential];

    pub fn slots(self) -> usize {
        match self {
            Encoding::Direct => 1,
            Encoding::Linear | Encoding::Exponential => 2,
        }
    }

    pub fn angle(self, slots: &[f64], x: f64) -> f64 {
        match self {
            Encoding::Direct => slots[0],
            Encoding::Linear => slots[0] * x + slots[1],
            Encoding::Exponential => slots[0] * x.exp() + slots[1],
        }
    }

    /// Partial derivatives of the angle with respect to each slot.
    pub fn slot_weights(self, x: f64) -> [f64; 2] {
        match self {
            Encoding::Direct => [1.0, 0.0],
            Encoding::Linear => [x, 1.0],
            Encoding::Exponential => [x.exp(), 1.0],
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Encoding::Direct => "",
            Encoding::Linear => "@lin",
            Encoding::Exponential => "@exp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rotation {
    pub axis: Axis,
    pub encoding: Encoding,
}

impl Rotation {
    pub fn ry() -> Self {
        Self { axis: Axis::Y, encoding: Encoding::Direct }
    }

    pub fn rz() -> Self {
        Self { axis: Axis::Z, encoding: Encoding::Direct }
    }
}

/// One layer: at most one rotation per qubit followed by qubit-disjoint ring
/// CNOTs. CNOTs are stored as a bitmask of control qubits, the target of
/// control `c` being `(c + 1) % n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LayerState {
    rotations: Vec<Option<Rotation>>,
    controls: u32,
}

impl LayerState {
    pub fn empty(n: usize) -> Self {
        Self { rotations: vec![None; n], controls: 0 }
    }

    pub fn new(rotations: Vec<Option<Rotation>>, controls: u32) -> Result<Self> {
        let state = Self { rotations, controls };
        state.validate()?;
        Ok(state)
    }

    /// Builds a state from plain rotations and a list of CNOT controls.
    pub fn from_parts(n: usize, rotations: &[(usize, Axis)], cnot_controls: &[usize]) -> Result<Self> {
        let mut rot = vec![None; n];
        for &(q, axis) in rotations {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
            if rot[q].is_some() {
                return Err(Error::Config(format!("two rotations on qubit {q} in one layer")));
            }
            rot[q] = Some(Rotation { axis, encoding: Encoding::Direct });
        }
        let mut controls = 0u32;
        for &c in cnot_controls {
            if c >= n {
                return Err(Error::QubitOutOfRange { index: c, n });
            }
            controls |= 1 << c;
        }
        Self::new(rot, controls)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits();
        if !(2..=MAX_QUBITS).contains(&n) {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        if self.controls >> n != 0 {
            return Err(Error::QubitOutOfRange { index: 31 - self.controls.leading_zeros() as usize, n });
        }
        let mut used = 0u32;
        for c in self.cnot_controls() {
            let t = (c + 1) % n;
            if used & (1 << c) != 0 || used & (1 << t) != 0 {
                return Err(Error::Config(format!("CNOT({c},{t}) overlaps another CNOT in the layer")));
            }
            used |= (1 << c) | (1 << t);
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.rotations.len()
    }

    pub fn rotations(&self) -> &[Option<Rotation>] {
        &self.rotations
    }

    pub fn rotation(&self, q: usize) -> Option<Rotation> {
        self.rotations[q]
    }

    pub(crate) fn set_rotation(&mut self, q: usize, rot: Option<Rotation>) {
        self.rotations[q] = rot;
    }

    pub fn controls_mask(&self) -> u32 {
        self.controls
    }

    pub(crate) fn set_controls(&mut self, controls: u32) {
        self.controls = controls;
    }

    pub fn cnot_controls(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_qubits()).filter(move |c| self.controls & (1 << c) != 0)
    }

    /// `(control, target)` pairs in ascending control order.
    pub fn cnots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n_qubits();
        self.cnot_controls().map(move |c| (c, (c + 1) % n))
    }

    pub fn is_empty(&self) -> bool {
        self.controls == 0 && self.rotations.iter().all(Option::is_none)
    }

    pub fn rotation_count(&self) -> usize {
        self.rotations.iter().flatten().count()
    }

    pub fn slot_count(&self) -> usize {
        self.rotations.iter().flatten().map(|r| r.encoding.slots()).sum()
    }

    /// Same gates with every encoding reset to [`Encoding::Direct`].
    pub fn structure(&self) -> Self {
        Self {
            rotations: self
                .rotations
                .iter()
                .map(|r| r.map(|r| Rotation { axis: r.axis, encoding: Encoding::Direct }))
                .collect(),
            controls: self.controls,
        }
    }

    /// Parses the single-line form written by `Display`.
    pub fn parse(n: usize, line: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 1, message: msg };
        let mut state = Self::empty(n);
        let line = line.trim();
        if line == "-" {
            return Ok(state);
        }
        for tok in line.split_whitespace() {
            if let Some(rest) = tok.strip_prefix("cx:") {
                let (c, t) = rest.split_once('>').ok_or_else(|| bad(format!("bad cnot `{tok}`")))?;
                let c: usize = c.parse().map_err(|_| bad(format!("bad control in `{tok}`")))?;
                let t: usize = t.parse().map_err(|_| bad(format!("bad target in `{tok}`")))?;
                if c >= n || t != (c + 1) % n {
                    return Err(Error::NonAdjacentCnot { control: c, target: t, n });
                }
                if state.controls & (1 << c) != 0 {
                    return Err(bad(format!("duplicate `{tok}`")));
                }
                state.controls |= 1 << c;
            } else if let Some(rest) = tok.strip_prefix('q') {
                let (q, gate) = rest.split_once(':').ok_or_else(|| bad(format!("bad gate `{tok}`")))?;
                let q: usize = q.parse().map_err(|_| bad(format!("bad qubit in `{tok}`")))?;
                if q >= n {
                    return Err(Error::QubitOutOfRange { index: q, n });
                }
                let (name, enc) = match gate.split_once('@') {
                    None => (gate, Encoding::Direct),
                    Some((name, "lin")) => (name, Encoding::Linear),
                    Some((name, "exp")) => (name, Encoding::Exponential),
                    Some(_) => return Err(bad(format!("unknown encoding in `{tok}`"))),
                };
                let axis = match name {
                    "Ry" => Axis::Y,
                    "Rz" => Axis::Z,
                    _ => return Err(bad(format!("unknown gate in `{tok}`"))),
                };
                if state.rotations[q].is_some() {
                    return Err(bad(format!("second rotation on qubit {q}")));
                }
                state.rotations[q] = Some(Rotation { axis, encoding: enc });
            } else {
                return Err(bad(format!("unrecognized token `{tok}`")));
            }
        }
        state.validate()?;
        Ok(state)
    }
}

impl fmt::Display for LayerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (q, r) in self.rotations.iter().enumerate() {
            if let Some(r) = r {
                let name = match r.axis {
                    Axis::Y => "Ry",
                    Axis::Z => "Rz",
                };
                parts.push(format!("q{q}:{name}{}", r.encoding.tag()));
            }
        }
        for (c, t) in self.cnots() {
            parts.push(format!("cx:{c}>{t}"));
        }
        if parts.is_empty() {
            write!(f, "-")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// A fixed-depth sequence of layers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AnsatzPath {
    layers: Vec<LayerState>,
}

impl AnsatzPath {
    pub fn empty(n: usize, n_layers: usize) -> Self {
        Self { layers: vec![LayerState::empty(n); n_layers] }
    }

    pub fn new(layers: Vec<LayerState>) -> Result<Self> {
        let n = layers.first().map(LayerState::n_qubits).unwrap_or(2);
        for l in &layers {
            if l.n_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, found: l.n_qubits() });
            }
            l.validate()?;
        }
        Ok(Self { layers })
    }

    pub fn n_qubits(&self) -> usize {
        self.layers.first().map(LayerState::n_qubits).unwrap_or(0)
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[LayerState] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<LayerState> {
        self.layers
    }

    pub fn rotation_count(&self) -> usize {
        self.layers.iter().map(LayerState::rotation_count).sum()
    }

    /// Length of the trainable parameter vector.
    pub fn slot_count(&self) -> usize {
        self.layers.iter().map(LayerState::slot_count).sum()
    }

    /// Start offset of each layer's slice of the parameter vector.
    pub fn slot_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.layers.len() + 1);
        let mut acc = 0;
        for l in &self.layers {
            offsets.push(acc);
            acc += l.slot_count();
        }
        offsets.push(acc);
        offsets
    }

    pub fn is_empty(&self) -> bool {
        self.layers.iter().all(LayerState::is_empty)
    }

    pub fn to_text(&self) -> String {
        self.layers.iter().map(|l| format!("{l}\n")).collect()
    }

    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let layers = text
            .lines()
            .enumerate()
            .map(|(i, line)| {
                LayerState::parse(n, line).map_err(|e| match e {
                    Error::Parse { message, .. } => Error::Parse { line: i + 1, message },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }
}

impl fmt::Display for AnsatzPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.layers.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" | "))
    }
}
