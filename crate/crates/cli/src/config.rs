//! Experiment configuration: one JSON file, overridable by flags.
//!
//! Every command resolves its configuration once and embeds it (or the
//! relevant columns of it) into whatever it writes, so outputs carry their
//! own provenance.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use shadowperc_core::{Adjacency, Axis, DistributionSpec, Side};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: DistributionSpec,
    pub width: u32,
    pub height: u32,
    pub lookahead: u32,
    #[serde(default)]
    pub levels: Vec<f64>,
    #[serde(default = "default_side")]
    pub side: Side,
    #[serde(default = "default_adjacency")]
    pub adjacency: Adjacency,
    #[serde(default = "default_axis")]
    pub axis: Axis,
    #[serde(default = "default_samples")]
    pub samples: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_side() -> Side {
    Side::Le
}

fn default_adjacency() -> Adjacency {
    Adjacency::Orthogonal
}

fn default_axis() -> Axis {
    Axis::Horizontal
}

fn default_samples() -> u64 {
    100
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            spec: DistributionSpec::gaussian(0.0, 1.0).expect("valid parameters"),
            width: 256,
            height: 256,
            lookahead: 256,
            levels: Vec::new(),
            side: default_side(),
            adjacency: default_adjacency(),
            axis: default_axis(),
            samples: default_samples(),
            seed: 0,
            out: None,
        }
    }
}

impl ExperimentConfig {
    /// Invariants every command relies on; call after resolving overrides.
    pub fn validate(&self) -> Result<(), String> {
        if self.width < 1 || self.height < 1 || self.lookahead < 1 {
            return Err("width, height and lookahead must be at least 1".into());
        }
        if self.samples < 1 {
            return Err("samples must be at least 1".into());
        }
        if self.levels.iter().any(|l| !l.is_finite()) {
            return Err("levels must be finite".into());
        }
        if self.levels.windows(2).any(|w| w[0] > w[1]) {
            return Err("levels must be sorted ascending".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_and_validates() {
        let config = ExperimentConfig::default();
        let json = serde_json::to_string(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.width, 256);
        assert!(back.validate().is_ok());
    }

    #[test]
    fn partial_config_gets_defaults() {
        let json = r#"{
            "spec": {"kind": "gaussian", "mean": 0.0, "sd": 1.0},
            "width": 4, "height": 2, "lookahead": 2, "seed": 7
        }"#;
        let config: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(config.samples, 100);
        assert_eq!(config.side, Side::Le);
        assert!(config.validate().is_ok());
    }

    #[test]
    fn unsorted_levels_rejected() {
        let config = ExperimentConfig {
            levels: vec![1.0, 0.5],
            ..ExperimentConfig::default()
        };
        assert!(config.validate().is_err());
    }
}
