//! JSON configuration for the whole pipeline.
//!
//! Every section is optional and falls back to its defaults. Keys carry their
//! units (`r_min_m`, `t_upper_n`, ...). When `planner.r_min_m` is absent the
//! tube radius of the configured system at the optimizer's tilt limit is
//! used.
//!
//! ```
//! use tuberrt::config::PipelineConfig;
//!
//! let cfg = PipelineConfig::from_json(r#"{"planner": {"max_iters": 500}}"#).unwrap();
//! assert_eq!(cfg.planner.max_iters, 500);
//! assert!((cfg.planner.r_min - cfg.tube_radius()).abs() < 1e-12);
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bench::{BenchConfig, EnvSpec, TrialSetup};
use crate::dynmodel::{SystemParams, VerifyBounds};
use crate::error::{Error, Result};
use crate::planner::{ExtendConfig, PlannerConfig};
use crate::sampler::SamplerConfig;
use crate::trajopt::OptConfig;
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(rename = "start_m")]
    pub start: Vec3,
    #[serde(rename = "goal_m")]
    pub goal: Vec3,
    /// Seed of the planner's random stream.
    pub seed: u64,
    pub planner: PlannerConfig,
    pub sampler: SamplerConfig,
    pub extend: ExtendConfig,
    pub optimizer: OptConfig,
    pub system: SystemParams,
    /// Audit limits; taken from the optimizer section when absent.
    pub verify: Option<VerifyBounds>,
    pub bench: BenchConfig,
    pub env_spec: EnvSpec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let mut cfg = Self {
            start: Vec3::new(6.0, 2.0, 10.0),
            goal: Vec3::new(40.0, 40.0, 5.0),
            seed: 0,
            planner: PlannerConfig::default(),
            sampler: SamplerConfig::default(),
            extend: ExtendConfig::default(),
            optimizer: OptConfig::default(),
            system: SystemParams::default(),
            verify: None,
            bench: BenchConfig::default(),
            env_spec: EnvSpec::default(),
        };
        cfg.planner.r_min = cfg.tube_radius();
        cfg
    }
}

impl PipelineConfig {
    /// Tube radius that fits the formation at the optimizer's tilt limit.
    pub fn tube_radius(&self) -> f64 {
        self.system.tube_radius(self.optimizer.alpha_u())
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let explicit_r_min = value.pointer("/planner/r_min_m").is_some();
        let mut cfg: Self = serde_json::from_value(value)?;
        if !explicit_r_min {
            cfg.planner.r_min = cfg.tube_radius();
        }
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(text)?)
    }

    /// Reads `path` (if any) and applies `key.path=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut value = match path {
            Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
            None => Value::Object(Default::default()),
        };
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        Self::from_value(value)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn verify_bounds(&self) -> VerifyBounds {
        self.verify.unwrap_or_else(|| self.optimizer.verify_bounds())
    }

    pub fn trial_setup(&self) -> TrialSetup {
        TrialSetup {
            sampler: self.sampler.clone(),
            extend: self.extend,
            planner: self.planner,
            master_seed: self.seed,
            wall_clock: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.planner.validate()?;
        self.sampler.validate()?;
        self.extend.potential.validate()?;
        self.extend.step.validate()?;
        self.system.validate()?;
        self.optimizer.validate(&self.system)?;
        self.bench.validate()
    }
}

/// Sets the dotted `key` in `doc` to `raw`, parsed as JSON when possible and
/// as a string otherwise. Intermediate objects are created as needed.
///
/// ```
/// let mut doc = serde_json::json!({});
/// tuberrt::config::apply_override(&mut doc, "planner.max_iters=800").unwrap();
/// assert_eq!(doc["planner"]["max_iters"], 800);
/// ```
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not of the form key.path=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("override key '{key}' has an empty component")));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = doc;
    for part in &parts[..parts.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("override '{key}' descends into a non-object")))?;
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    node.as_object_mut()
        .ok_or_else(|| Error::Config(format!("override '{key}' descends into a non-object")))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = PipelineConfig::from_json("{}").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn r_min_follows_the_system_unless_given() {
        let cfg = PipelineConfig::from_json(r#"{"optimizer": {"alpha_u_deg": 10.0}}"#).unwrap();
        let expected = SystemParams::default().tube_radius(10f64.to_radians());
        assert!((cfg.planner.r_min - expected).abs() < 1e-12);
        let cfg = PipelineConfig::from_json(r#"{"planner": {"r_min_m": 0.5}}"#).unwrap();
        assert_eq!(cfg.planner.r_min, 0.5);
    }

    #[test]
    fn overrides_create_and_replace_keys() {
        let mut doc = json!({"planner": {"max_iters": 10}});
        apply_override(&mut doc, "planner.max_iters=20").unwrap();
        apply_override(&mut doc, "planner.variant=stube").unwrap();
        apply_override(&mut doc, "start_m=[1, 2, 3]").unwrap();
        let cfg = PipelineConfig::from_value(doc).unwrap();
        assert_eq!(cfg.planner.max_iters, 20);
        assert_eq!(cfg.planner.variant.name(), "stube");
        assert_eq!(cfg.start, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn malformed_overrides_are_rejected() {
        let mut doc = json!({"seed": 3});
        assert!(apply_override(&mut doc, "seed").is_err());
        assert!(apply_override(&mut doc, "seed.inner=1").is_err());
        assert!(apply_override(&mut doc, "a..b=1").is_err());
    }

    #[test]
    fn unknown_top_level_keys_are_rejected() {
        assert!(PipelineConfig::from_json(r#"{"planer": {}}"#).is_err());
    }

    #[test]
    fn unknown_nested_keys_are_rejected() {
        for doc in [
            r#"{"planner": {"max_iter": 10}}"#,
            r#"{"planner": {"cost": {"w_turns": 1.0}}}"#,
            r#"{"extend": {"step": {"taus": 0.3}}}"#,
            r#"{"optimizer": {"t_upper": 35}}"#,
            r#"{"bench": {"seed": 3}}"#,
        ] {
            assert!(PipelineConfig::from_json(doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn roundtrip() {
        let cfg = PipelineConfig::default();
        assert_eq!(PipelineConfig::from_json(&cfg.to_json().unwrap()).unwrap(), cfg);
    }
}
