use std::fs;
use std::path::Path;

use serde::Deserialize;

/// Run parameters. Every field has a default; a JSON file may set any
/// subset and command-line flags override both.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "M")]
    pub m: f64,
    /// Free-form label echoed in scan headers.
    pub units: String,
    pub models: ModelConfig,
    pub format: Option<Format>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub g: f64,
    pub eta: f64,
    pub f_pi: f64,
    pub f: f64,
    pub m_pi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: 1.0,
            units: "natural".into(),
            models: ModelConfig::default(),
            format: None,
            seed: 0,
        }
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { g: 1.0, eta: 1.0, f_pi: 93.0, f: 1.0, m_pi: 138.0 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}
