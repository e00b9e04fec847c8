//! JSON run configuration: preset overrides with strict schema checking.
//!
//! Every section is optional; anything not given falls back to the preset.
//! Unknown keys are rejected so typos fail loudly, and parse errors carry
//! serde_json's line/column diagnostics.

use crate::presets::{PresetName, ScenarioPreset};
use bubble_core::{ModelError, NoiseFamily, ResponseSpec};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_family: Option<NoiseFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisOverrides {
    /// Corridor margin constant c_m (default 0.1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_m: Option<f64>,
    /// Threshold on nu S'(0)/mu (default 0.1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assumption_i_threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_seed: Option<u64>,
    /// Stand-in K for the universal constant in the Phi bounds (default 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_constant: Option<f64>,
}

/// The full override bundle a config file may carry.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetName>,
    #[serde(default)]
    pub params: ParamOverrides,
    #[serde(default)]
    pub response: ResponseOverrides,
    #[serde(default)]
    pub sim: SimOverrides,
    #[serde(default)]
    pub analysis: AnalysisOverrides,
    #[serde(default)]
    pub mc: McOverrides,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// A preset with every override applied: what actually runs, echoed into
/// the report for reproduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedScenario {
    pub preset: ScenarioPreset,
    pub c_m: f64,
    pub assumption_i_threshold: f64,
    pub mc_replicates: usize,
    pub mc_base_seed: u64,
    pub k_constant: f64,
}

impl ResolvedScenario {
    pub fn new(name: PresetName) -> Self {
        ResolvedScenario {
            preset: ScenarioPreset::get(name),
            c_m: bubble_core::analysis::DEFAULT_C_M,
            assumption_i_threshold: bubble_core::analysis::DEFAULT_ASSUMPTION_I_THRESHOLD,
            mc_replicates: 2000,
            mc_base_seed: 1,
            k_constant: 1.0,
        }
    }

    pub fn apply(mut self, cfg: &RunConfig) -> Result<Self, ConfigError> {
        let p = &mut self.preset;
        if let Some(mu) = cfg.params.mu {
            p.params.mu = mu;
        }
        if let Some(sigma) = cfg.params.sigma {
            p.params.sigma = sigma;
        }
        if let Some(nu) = cfg.params.nu {
            p.params.nu = nu;
        }
        p.params.validate()?;
        if let Some(d) = cfg.response.d {
            p.response.d = d;
        }
        if let Some(n) = cfg.response.n {
            p.response.n = n;
        }
        if let Some(normalized) = cfg.response.normalized {
            p.response.normalized = normalized;
        }
        p.response = ResponseSpec::new(p.response.d, p.response.n, p.response.normalized)?;
        if let Some(dt) = cfg.sim.dt {
            p.dt = dt;
            // stride is tied to the grid; reset unless explicitly overridden
            if cfg.sim.record_stride.is_none() {
                p.record_stride = 1;
            }
        }
        if let Some(h) = cfg.sim.horizon {
            p.horizon = h;
        }
        if let Some(seed) = cfg.sim.seed {
            p.seed = seed;
        }
        if let Some(f) = cfg.sim.noise_family {
            p.noise_family = f;
        }
        if let Some(s) = cfg.sim.record_stride {
            p.record_stride = s;
        }
        if let Some(c_m) = cfg.analysis.c_m {
            self.c_m = c_m;
        }
        if let Some(t) = cfg.analysis.assumption_i_threshold {
            self.assumption_i_threshold = t;
        }
        if let Some(r) = cfg.mc.replicates {
            self.mc_replicates = r;
        }
        if let Some(s) = cfg.mc.base_seed {
            self.mc_base_seed = s;
        }
        if let Some(k) = cfg.mc.k_constant {
            self.k_constant = k;
        }
        Ok(self)
    }
}
