//! Text formats: point clouds, scenarios, CSV tables and key-value reports.

mod cloud;
mod csv;
mod kv;

pub use cloud::{parse_cloud, write_cloud};
pub use csv::{
    parse_samples_csv, samples_csv, steps_csv, verdicts_csv, SAMPLE_HEADER, STEP_HEADER,
};
pub use kv::{report_kv, summary_kv, termination_str, verdict_str, KeyValues};

use crate::avoidance::ReplanConfig;
use crate::collision::CoverageClass;
use crate::sim::Scenario;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

/// Parse a TOML scenario; unknown keys are errors.
pub fn parse_scenario(text: &str) -> Result<Scenario, String> {
    let sc: Scenario = toml::from_str(text).map_err(|e| e.to_string())?;
    sc.validate()?;
    Ok(sc)
}

pub fn write_scenario(sc: &Scenario) -> Result<String, String> {
    toml::to_string(sc).map_err(|e| e.to_string())
}

/// Parse a TOML replanning configuration; missing keys take defaults.
pub fn parse_config(text: &str) -> Result<ReplanConfig, String> {
    let cfg: ReplanConfig = toml::from_str(text).map_err(|e| e.to_string())?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn write_config(cfg: &ReplanConfig) -> Result<String, String> {
    toml::to_string(cfg).map_err(|e| e.to_string())
}

pub fn coverage_str(c: CoverageClass) -> &'static str {
    match c {
        CoverageClass::Observable => "observable",
        CoverageClass::UpperCone => "upper_cone",
        CoverageClass::LowerCone => "lower_cone",
        CoverageClass::OutOfRange => "out_of_range",
        CoverageClass::InsideBody => "inside_body",
    }
}
