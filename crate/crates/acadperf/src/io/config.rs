use std::path::Path;

use acadperf_core::regress::ModelSpec;
use acadperf_core::sim::SimConfig;
use serde::de::DeserializeOwned;

use super::read_to_string;
use crate::error::{AppError, Result};

fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    toml::from_str(&read_to_string(path)?).map_err(|e| AppError::format(path, e))
}

/// Model specification from TOML; missing keys take their defaults.
pub fn load_model_spec(path: &Path) -> Result<ModelSpec> {
    let spec: ModelSpec = load(path)?;
    spec.validate().map_err(|e| AppError::format(path, e))?;
    Ok(spec)
}

/// Simulator configuration from TOML; missing keys take their defaults.
pub fn load_sim_config(path: &Path) -> Result<SimConfig> {
    let config: SimConfig = load(path)?;
    config.validate().map_err(|e| AppError::format(path, e))?;
    Ok(config)
}

pub fn sim_config_to_toml(config: &SimConfig) -> String {
    toml::to_string(config).expect("simulator config serializes")
}
