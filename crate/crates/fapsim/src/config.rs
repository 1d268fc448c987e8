//! Run configuration: airframe coefficients and link budget.
//!
//! Every value ships with a default and can be overridden from a JSON file,
//! so deployments can swap airframes or radio settings without rebuilding.

use serde::{Deserialize, Serialize};

use crate::energy::{FixedWingParams, RotaryWingParams};
use crate::error::{Error, Result};
use crate::radio::LinkBudget;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub rotary: RotaryWingParams,
    pub fixed: FixedWingParams,
    pub link: LinkBudget,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.rotary.validate()?;
        self.fixed.validate()?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override_keeps_other_defaults() {
        let cfg = SimConfig::from_json(r#"{"fixed": {"min_turn_radius_m": 8.0}}"#).unwrap();
        assert_eq!(cfg.fixed.min_turn_radius_m, 8.0);
        assert_eq!(cfg.fixed.parasitic_coefficient, 9.26e-4);
        assert_eq!(cfg.rotary.blade_profile_power_w, 79.86);
        assert_eq!(cfg.link.tx_power_dbm, 20.0);
    }

    #[test]
    fn shipped_default_config_matches_builtins() {
        let text = include_str!("../data/default_config.json");
        let cfg = SimConfig::from_json(text).unwrap();
        let builtin = SimConfig::default();
        assert_eq!(
            serde_json::to_string(&cfg).unwrap(),
            serde_json::to_string(&builtin).unwrap()
        );
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(SimConfig::from_json(r#"{"rotary": {"rotor_solidity": 2.0}}"#).is_err());
        assert!(SimConfig::from_json("not json").is_err());
    }
}
