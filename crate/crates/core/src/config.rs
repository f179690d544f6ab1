//! Run configuration for the generation, evaluation and sweep pipelines.
//!
//! Every field has a default, so `{}` is the reference experiment: the random
//! scenario with 100 nodes and 30 splits, alpha 0.9, beta 0.1, window 2 and
//! all four detectors. Seeds inside `scenario`, `edges` and `detectors` are
//! ignored by the pipelines; they are derived from the master `seed`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::detect::{DetectorConfig, Method};
use crate::edgegen::EdgeGenParams;
use crate::error::{Error, Result};
use crate::rng::mix_seed;
use crate::scenario::ScenarioParams;

pub const DEFAULT_WINDOW: f64 = 2.0;
pub const DEFAULT_SWEEP_SEEDS: usize = 10;
pub const MAX_PHI: f64 = 0.5;

pub fn default_phis() -> Vec<f64> {
    vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
}

fn default_seeds() -> usize {
    DEFAULT_SWEEP_SEEDS
}

fn default_window() -> f64 {
    DEFAULT_WINDOW
}

fn default_detectors() -> Vec<DetectorConfig> {
    Method::ALL.into_iter().map(DetectorConfig::new).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Difficulty values; each maps to `alpha = 1 - phi`, `beta = phi`.
    #[serde(default = "default_phis")]
    pub phi: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            phi: default_phis(),
            seeds: DEFAULT_SWEEP_SEEDS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "ScenarioParams::reference")]
    pub scenario: ScenarioParams,
    #[serde(default = "EdgeGenParams::reference")]
    pub edges: EdgeGenParams,
    /// Aggregation window length, in time units.
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default = "default_detectors")]
    pub detectors: Vec<DetectorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: ScenarioParams::reference(),
            edges: EdgeGenParams::reference(),
            window: DEFAULT_WINDOW,
            detectors: default_detectors(),
            sweep: None,
            out: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialises");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.edges.validate()?;
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(Error::param(format!("window must be positive and finite, got {}", self.window)));
        }
        for d in &self.detectors {
            d.validate()?;
        }
        if let Some(sw) = &self.sweep {
            if sw.phi.is_empty() || sw.seeds == 0 {
                return Err(Error::param("sweep needs at least one phi value and one seed"));
            }
            if let Some(bad) = sw.phi.iter().find(|p| !(0.0..=MAX_PHI).contains(*p)) {
                return Err(Error::param(format!("phi must lie in [0, {MAX_PHI}], got {bad}")));
            }
        }
        Ok(())
    }

    /// Scenario parameters with the seed derived from the master seed.
    pub fn scenario_params(&self) -> ScenarioParams {
        ScenarioParams {
            seed: mix_seed(self.seed, 1),
            ..self.scenario.clone()
        }
    }

    pub fn edge_params(&self) -> EdgeGenParams {
        EdgeGenParams {
            seed: mix_seed(self.seed, 2),
            ..self.edges.clone()
        }
    }

    pub fn detector_configs(&self) -> Vec<DetectorConfig> {
        let seed = mix_seed(self.seed, 3);
        self.detectors.iter().map(|d| DetectorConfig { seed, ..*d }).collect()
    }

    /// The configuration of one sweep point.
    pub fn at_point(&self, phi: f64, seed: u64) -> RunConfig {
        let mut cfg = self.clone();
        cfg.edges.alpha = 1.0 - phi;
        cfg.edges.beta = phi;
        cfg.seed = seed;
        cfg.sweep = None;
        cfg
    }

    /// Keeps the given methods, reusing configured thresholds where present.
    pub fn select_methods(&mut self, methods: &[Method]) {
        self.detectors = methods
            .iter()
            .map(|&m| {
                self.detectors
                    .iter()
                    .find(|d| d.method == m)
                    .copied()
                    .unwrap_or_else(|| DetectorConfig::new(m))
            })
            .collect();
    }
}

pub fn parse_config_bytes(bytes: &[u8]) -> Result<RunConfig> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::parse(0, "invalid UTF-8"))?;
    RunConfig::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_the_reference_run() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.detectors.len(), 4);
        assert_eq!(cfg.window, 2.0);
        assert_eq!(cfg.scenario.k, 30);
    }

    #[test]
    fn round_trip_and_sweep_defaults() {
        let cfg = RunConfig::from_json(r#"{"sweep": {}, "seed": 7}"#).unwrap();
        let sw = cfg.sweep.as_ref().unwrap();
        assert_eq!(sw.phi, default_phis());
        assert_eq!(sw.seeds, 10);
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        let p = cfg.at_point(0.3, 5);
        assert_eq!(p.edges.alpha, 0.7);
        assert_eq!(p.edges.beta, 0.3);
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            r#"{"window": 0}"#,
            r#"{"sweep": {"phi": [0.6]}}"#,
            r#"{"sweep": {"seeds": 0}}"#,
            r#"{"edges": {"alpha": 0, "beta": 0, "lambda_in": 1, "lambda_ext": 1}}"#,
        ] {
            assert!(matches!(RunConfig::from_json(text), Err(Error::Parameter(_))), "{text}");
        }
        assert!(matches!(RunConfig::from_json(r#"{"windw": 2}"#), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(RunConfig::from_json("{\n\"window\": \"x\"}"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn derived_seeds_differ_per_stage() {
        let cfg = RunConfig { seed: 3, ..RunConfig::default() };
        let s = cfg.scenario_params().seed;
        let e = cfg.edge_params().seed;
        let d = cfg.detector_configs()[0].seed;
        assert!(s != e && e != d && s != d);
    }

    #[test]
    fn select_methods_keeps_settings() {
        let mut cfg = RunConfig::default();
        cfg.detectors[3].rho = 0.5;
        cfg.select_methods(&[Method::SmoothedGraph, Method::NoSmoothing]);
        assert_eq!(cfg.detectors.len(), 2);
        assert_eq!(cfg.detectors[0].rho, 0.5);
        assert_eq!(cfg.detectors[1].method, Method::NoSmoothing);
    }
}
