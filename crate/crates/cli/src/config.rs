use std::path::Path;

use anyhow::{Context, Result};
use gsa_core::driver::GsaConfig;
use gsa_core::sim::NoiseSpec;
use serde::Deserialize;

/// Experiment configuration. Every key is optional; a missing file or
/// section means the reference defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub gsa: GsaConfig,
    pub noise: NoiseSection,
    pub hea: HeaSection,
    pub rnd: RndSection,
    pub meta: MetaSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub enabled: bool,
    pub p1: f64,
    pub p2: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let d = NoiseSpec::default();
        Self { enabled: d.enabled, p1: d.p1, p2: d.p2 }
    }
}

impl NoiseSection {
    pub fn spec(&self) -> Result<NoiseSpec> {
        let mut spec = NoiseSpec::new(self.p1, self.p2)?;
        spec.enabled = self.enabled;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeaSection {
    pub layers: usize,
}

impl Default for HeaSection {
    fn default() -> Self {
        Self { layers: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RndSection {
    pub samples: usize,
    /// Defaults to the search depth in `[gsa]`.
    pub layers: Option<usize>,
    pub retrain_all: bool,
}

impl Default for RndSection {
    fn default() -> Self {
        Self { samples: 8600, layers: None, retrain_all: false }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetaSection {
    /// Family parameter values the circuit is trained on.
    pub training: Vec<f64>,
    /// Values at which the trained circuit is profiled.
    pub grid: Vec<f64>,
    /// Search depth for the encoded search.
    pub layers: usize,
    /// HEA blocks with linear encodings, then plain blocks.
    pub encoding_layers: usize,
    pub processing_layers: usize,
}

impl Default for MetaSection {
    fn default() -> Self {
        Self {
            training: vec![0.6, 1.0, 1.4],
            grid: (0..=18).map(|i| 0.2 + 0.1 * i as f64).collect(),
            layers: 4,
            encoding_layers: 1,
            processing_layers: 1,
        }
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text)?;
        cfg.gsa.validate()?;
        cfg.noise.spec()?;
        Ok(cfg)
    }
}
