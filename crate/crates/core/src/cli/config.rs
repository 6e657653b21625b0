//! Run configuration: a TOML file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Every parameter a command reads. Unset fields take command-specific
/// defaults; the effective (defaulted) config is what gets persisted, so a
/// run is reproducible from the stored config alone.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Binomial sample size (fixed number of points).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    /// Poisson intensity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Size grid (n or lambda values); overrides `n` / `lambda` as the list
    /// of sizes while they still select the model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hmax: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Diagnostics to run: `paralem`, `h-tail`, `r-tail`, `intensity`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Vec<String>>,
    /// Run the `h_max + 2` truncation audit in `limit-model`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<bool>,
    /// Largest tolerated fraction of failed replicates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy_budget: Option<f64>,
    /// Existing bundle directory (for `report`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

impl RunConfig {
    /// Parses a TOML config; syntax and type errors carry line and column.
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overridden_by(mut self, flags: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        take!(dim, n, lambda, grid, reps, seed, workers, window_l, hmax, route, functional, k, out, diagnostics, sensitivity, degeneracy_budget, input);
        self
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config is serializable");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Config("--seed: a master seed is required (no time-based seeding)".into()))
    }

    pub fn dim_at_least(&self, min: usize, default: usize) -> Result<usize> {
        let d = self.dim.unwrap_or(default);
        if d < min {
            return Err(Error::Config(format!("--dim: must be at least {min} (got {d})")));
        }
        Ok(d)
    }

    pub fn reps_or(&self, default: usize) -> usize {
        self.reps.unwrap_or(default)
    }

    pub fn positive(&self, flag: &str, value: Option<f64>, default: f64) -> Result<f64> {
        let v = value.unwrap_or(default);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("--{flag}: must be positive and finite (got {v})")));
        }
        Ok(v)
    }

    /// A strictly increasing grid from `grid`, else `[single]`, else `default`.
    pub fn size_grid(&self, single: Option<f64>, default: &[f64]) -> Result<Vec<f64>> {
        let g = match (&self.grid, single) {
            (Some(g), _) => g.clone(),
            (None, Some(s)) => vec![s],
            (None, None) => default.to_vec(),
        };
        if g.is_empty() || g.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::Config(format!("--grid: sizes must be positive and finite (got {g:?})")));
        }
        if g.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!("--grid: sizes must be strictly increasing (got {g:?})")));
        }
        Ok(g)
    }

    pub fn budget(&self) -> Result<f64> {
        let b = self.degeneracy_budget.unwrap_or(0.01);
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::Config(format!("degeneracy_budget: must lie in [0, 1] (got {b})")));
        }
        Ok(b)
    }
}
