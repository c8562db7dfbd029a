//! JSON run configuration.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use cga_core::anneal::AnnealingConfig;
use cga_core::market::ScenarioKind;
use cga_core::{MarketEstimates, PenaltyMode, PenaltyParams, ReturnKind};
use serde::{Deserialize, Serialize};

use crate::agents::{default_roster, AgentSpec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub kind: ScenarioKind,
    pub n: usize,
    /// Number of closes per asset.
    #[serde(alias = "T")]
    pub periods: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prices: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sectors: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
    #[serde(default)]
    pub returns: ReturnKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PenaltyConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Return target; the mean of the asset mean returns when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rp: Option<f64>,
    pub mode: PenaltyMode,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self { alpha: 1000.0, beta: 1000.0, rp: None, mode: PenaltyMode::default() }
    }
}

impl PenaltyConfig {
    pub fn resolve(&self, est: &MarketEstimates) -> Result<PenaltyParams> {
        let rp = self.rp.unwrap_or_else(|| est.r.iter().sum::<f64>() / est.n.max(1) as f64);
        let pp = PenaltyParams { alpha: self.alpha, beta: self.beta, rp };
        pp.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(pp)
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataConfig,
    #[serde(default = "default_roster")]
    pub agents: Vec<AgentSpec>,
    #[serde(default)]
    pub sa: AnnealingConfig,
    #[serde(default)]
    pub penalty: PenaltyConfig,
    /// Per-period risk-free rate used for the reported Sharpe ratio.
    #[serde(default)]
    pub risk_free: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn synthetic(synth: SynthConfig) -> Self {
        Self {
            data: DataConfig { synth: Some(synth), ..Default::default() },
            agents: default_roster(),
            sa: AnnealingConfig::default(),
            penalty: PenaltyConfig::default(),
            risk_free: 0.0,
            output_dir: default_output_dir(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative paths inside it are taken from the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            e => e,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.data.prices, &mut cfg.data.sectors].into_iter().flatten() {
            *p = base.join(&*p);
        }
        cfg.output_dir = base.join(&cfg.output_dir);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.data.prices, &self.data.synth) {
            (Some(_), Some(_)) => return Err(Error::Config("data: give either `prices` or `synth`, not both".into())),
            (None, None) => return Err(Error::Config("data: one of `prices` or `synth` is required".into())),
            (None, Some(_)) if self.data.sectors.is_some() => {
                return Err(Error::Config("data: `sectors` only applies to a price file".into()))
            }
            _ => {}
        }
        if self.agents.is_empty() {
            return Err(Error::Config("agents: roster is empty".into()));
        }
        let mut ids = HashSet::new();
        for a in &self.agents {
            if !ids.insert(a.id.as_str()) {
                return Err(Error::Config(format!("agents: duplicate id `{}`", a.id)));
            }
            a.parse()?;
        }
        self.sa.validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.penalty.alpha >= 0.0 && self.penalty.beta >= 0.0) {
            return Err(Error::Config("penalty: alpha and beta must be non-negative".into()));
        }
        if !self.risk_free.is_finite() || self.penalty.rp.is_some_and(|v| !v.is_finite()) {
            return Err(Error::Config("risk_free and penalty.rp must be finite".into()));
        }
        Ok(())
    }

    /// Replaces every seed in the configuration: scenario, annealer and seeded agents.
    pub fn override_seed(&mut self, seed: u64) {
        self.sa.seed = seed;
        if let Some(s) = &mut self.data.synth {
            s.seed = seed;
        }
        for a in &mut self.agents {
            if a.kind.is_seeded() {
                a.params.insert("seed".into(), seed.into());
            }
        }
    }
}
