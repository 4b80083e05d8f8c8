//! TOML configuration.
//!
//! Lookup order: an explicit path, then `$MACROBALL_CONFIG`, then
//! `./macroball.toml`, then the built-in defaults. Every report embeds the
//! SHA-256 of the effective configuration in canonical JSON form.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::{ExternalConstants, Pipeline};
use crate::error::{Error, Result};
use crate::extremal::RaySearch;
use crate::hypgeom::Dim;
use crate::numerics::Tolerance;

pub const ENV_VAR: &str = "MACROBALL_CONFIG";
pub const DEFAULT_PATH: &str = "macroball.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub quad_rel: f64,
    pub quad_abs: f64,
    pub quad_max_depth: u32,
    /// Absolute tolerance of the ray searches.
    pub extremal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let q = Tolerance::default();
        Tolerances {
            quad_rel: q.rel,
            quad_abs: q.abs,
            quad_max_depth: q.max_depth,
            extremal: RaySearch::default().tol,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExternalSection {
    pub croke_cprime: BTreeMap<String, f64>,
    pub ideal_simplex_vol_override: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub r_values: Vec<f64>,
    pub lambda_values: Vec<f64>,
    pub dims: Vec<usize>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            r_values: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            lambda_values: vec![0.5, 1.0, 2.0, 5.0, 10.0],
            dims: vec![2, 3, 4],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub format: Format,
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tolerances: Tolerances,
    pub external_constants: ExternalSection,
    pub grid: Grid,
    pub max_ray_cut: f64,
    pub output: Output,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tolerances: Tolerances::default(),
            external_constants: ExternalSection::default(),
            grid: Grid::default(),
            max_ray_cut: RaySearch::default().max_ray_cut,
            output: Output::default(),
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Config> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Config::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Resolves the configuration file to use, if any.
    pub fn locate(explicit: Option<&Path>) -> Option<PathBuf> {
        if let Some(p) = explicit {
            return Some(p.to_path_buf());
        }
        if let Some(p) = std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()) {
            return Some(PathBuf::from(p));
        }
        let local = PathBuf::from(DEFAULT_PATH);
        local.is_file().then_some(local)
    }

    pub fn load(explicit: Option<&Path>) -> Result<Config> {
        match Config::locate(explicit) {
            Some(path) => Config::from_path(&path),
            None => Ok(Config::default()),
        }
    }

    /// Structural checks. Tolerance values are checked where they are used, so
    /// an over-tight tolerance surfaces as a failed computation.
    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if g.r_values.is_empty() || g.lambda_values.is_empty() || g.dims.is_empty() {
            return Err(Error::Config("grid lists must be non-empty".into()));
        }
        if let Some(&n) = g.dims.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!(
                "grid.dims: dimension {n} is below 2"
            )));
        }
        for (name, list) in [
            ("r_values", &g.r_values),
            ("lambda_values", &g.lambda_values),
        ] {
            if let Some(v) = list.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(Error::Config(format!("grid.{name}: {v} is not positive")));
            }
        }
        if !(self.max_ray_cut > 0.0 && self.max_ray_cut.is_finite()) {
            return Err(Error::Config(format!(
                "max_ray_cut = {} must be positive",
                self.max_ray_cut
            )));
        }
        self.externals()?.validate()
    }

    pub fn externals(&self) -> Result<ExternalConstants> {
        let convert = |name: &str, map: &BTreeMap<String, f64>| -> Result<BTreeMap<usize, f64>> {
            map.iter()
                .map(|(k, &v)| {
                    k.trim()
                        .parse::<usize>()
                        .map(|n| (n, v))
                        .map_err(|_| Error::Config(format!("{name}: key {k:?} is not a dimension")))
                })
                .collect()
        };
        let ext = ExternalConstants {
            croke_cprime: convert("croke_cprime", &self.external_constants.croke_cprime)?,
            ideal_simplex_vol_override: convert(
                "ideal_simplex_vol_override",
                &self.external_constants.ideal_simplex_vol_override,
            )?,
        };
        ext.validate()?;
        Ok(ext)
    }

    pub fn quad_tolerance(&self) -> Tolerance {
        Tolerance {
            rel: self.tolerances.quad_rel,
            abs: self.tolerances.quad_abs,
            max_depth: self.tolerances.quad_max_depth,
        }
    }

    pub fn ray_search(&self) -> RaySearch {
        RaySearch {
            tol: self.tolerances.extremal,
            max_ray_cut: self.max_ray_cut,
            step_factor: 1.0,
        }
    }

    pub fn pipeline(&self) -> Pipeline {
        Pipeline::new(self.quad_tolerance(), self.ray_search())
    }

    pub fn grid_dims(&self) -> Result<Vec<Dim>> {
        self.grid.dims.iter().map(|&n| Dim::new(n)).collect()
    }

    /// Hex SHA-256 of the canonical JSON form of this configuration.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}
