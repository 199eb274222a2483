use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::UsageError;

/// Defaults loaded from `--config`; any flag given on the command line wins.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub method: Option<String>,
    pub ste: Option<f64>,
    pub bi: Option<f64>,
    pub limit: Option<bool>,
    pub preset: Option<String>,
    pub k: Option<f64>,
    pub rho: Option<f64>,
    pub c: Option<f64>,
    pub lambda: Option<f64>,
    pub h: Option<f64>,
    pub theta: Option<f64>,
    pub t: Option<f64>,
    pub positions: Option<Vec<f64>>,
    pub bi_min: Option<f64>,
    pub bi_max: Option<f64>,
    pub points: Option<usize>,
    pub log: Option<bool>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub quick: Option<bool>,
    pub coefficients: Option<String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())).into())
    }
}
