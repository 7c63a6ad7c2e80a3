//! Run configuration: tolerance overrides and law-suite defaults, read from
//! a JSON file named on the command line or by `QSETS_CONFIG`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Tolerance;

/// Environment variable holding the default configuration path.
pub const CONFIG_ENV: &str = "QSETS_CONFIG";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub rank_cut: Option<f64>,
    #[serde(default)]
    pub eq_tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<usize>,
    /// Default output path for verbs that write JSON.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        self.tolerance()?;
        if self.trials == Some(0) {
            return Err(Error::InvalidArgument("config: trials must be at least 1".into()));
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Result<Tolerance> {
        let d = Tolerance::default();
        Tolerance::new(self.rank_cut.unwrap_or(d.rank_cut), self.eq_tol.unwrap_or(d.eq_tol))
    }

    /// Parses a config file, reporting the failing field path on schema
    /// errors.
    pub fn from_json(text: &str) -> std::result::Result<Config, String> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            format!("at `{path}`: {}", e.into_inner())
        })?;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> std::result::Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Config::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}
