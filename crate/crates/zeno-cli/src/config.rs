//! Optional JSON configuration file mirroring the command-line flags.
//!
//! Keys are the long flag names; values use the same syntax as the flag
//! values (lists and locators stay strings). Explicit flags win over the
//! config file.

use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "M")]
    pub m: Option<u32>,
    #[serde(rename = "N")]
    pub n: Option<u32>,
    pub bit: Option<u8>,
    pub post: Option<String>,
    pub format: Option<String>,
    pub output: Option<String>,
    pub seed: Option<u64>,
    #[serde(rename = "n-runs")]
    pub n_runs: Option<u64>,
    pub monitor: Option<String>,
    pub placement: Option<String>,
    pub g: Option<f64>,
    pub sigma: Option<f64>,
    pub prior: Option<f64>,
    #[serde(rename = "couple-at")]
    pub couple_at: Option<String>,
    #[serde(rename = "density-output")]
    pub density_output: Option<String>,
    #[serde(rename = "m-list")]
    pub m_list: Option<String>,
    #[serde(rename = "n-list")]
    pub n_list: Option<String>,
    #[serde(rename = "g-list")]
    pub g_list: Option<String>,
    pub eve: Option<bool>,
    #[serde(rename = "max-points")]
    pub max_points: Option<u64>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&str>) -> Result<Self, String> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {path}: {e}"))?;
        serde_json::from_str(&text).map_err(|e| format!("config {path}: {e}"))
    }
}
