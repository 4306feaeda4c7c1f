use std::path::Path;

use serde::Deserialize;
use stabtop::{Charge, ProjPoint, UniverseBounds};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
pub enum Model {
    #[default]
    #[serde(rename = "P1")]
    P1,
    #[serde(rename = "localP1")]
    LocalP1,
}

/// Run configuration. Rationals are exact strings; unknown keys are
/// rejected.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub charge: Charge,
    #[serde(default)]
    pub model: Model,
    /// Heart index for `localP1`; objects are read in the coordinates of
    /// the heart generated by `O(w-1)[1]` and `O(w)`.
    #[serde(default)]
    pub w: i64,
    #[serde(default = "default_bounds")]
    pub bounds: UniverseBounds,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub fn default_bounds() -> UniverseBounds {
    UniverseBounds::new(3, 3, (-1, 1), ProjPoint::over_prime(2))
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid config: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_json(&text)
    }
}
