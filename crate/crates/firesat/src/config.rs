//! Run configuration. Precedence: command-line flags, then the config file,
//! then built-in defaults.

use std::path::{Path, PathBuf};

use firesat_core::constellation::GeneBounds;
use firesat_core::coverage::{build_grid, EvalConfig, FitnessWeights, RegionConfig, RegionGrid, SensorModel};
use firesat_core::edgesim::{GeoSatellite, LinkBudget, LinkGeometry};
use firesat_core::kepler::EarthModel;
use firesat_core::optimizer::GaConfig;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};
use crate::io::read_json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub earth: EarthModel,
    /// Region JSON; relative paths resolve against the config file.
    pub region: Option<PathBuf>,
    pub sensor: SensorModel,
    pub dt_s: f64,
    pub day_length_s: f64,
    pub weights: FitnessWeights,
    pub ga: GaConfig,
    pub bounds: GeneBounds,
    pub budget: LinkBudget,
    pub geometry: LinkGeometry,
    pub geo: GeoSatellite,
    pub output_dir: Option<PathBuf>,
    /// Overrides `ga.seed` when set.
    pub seed: Option<u64>,
    /// Write a GA checkpoint every this many generations; 0 disables.
    pub checkpoint_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let eval = EvalConfig::default();
        Self {
            earth: EarthModel::default(),
            region: None,
            sensor: eval.sensor,
            dt_s: eval.dt_s,
            day_length_s: eval.day_length_s,
            weights: eval.weights,
            ga: GaConfig::default(),
            bounds: GeneBounds::default(),
            budget: LinkBudget::default(),
            geometry: LinkGeometry::default(),
            geo: GeoSatellite::default(),
            output_dir: None,
            seed: None,
            checkpoint_every: 0,
        }
    }
}

impl RunConfig {
    /// Reads a config file and resolves its relative paths. Every referenced
    /// path must exist.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: RunConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(r) = &cfg.region {
            if r.is_relative() {
                cfg.region = Some(base.join(r));
            }
        }
        if let Some(o) = &cfg.output_dir {
            if o.is_relative() {
                cfg.output_dir = Some(base.join(o));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(r) = &self.region {
            if !r.exists() {
                return Err(AppError::Config(format!("region file {} does not exist", r.display())));
            }
        }
        self.earth.validate().map_err(AppError::Kepler)?;
        self.budget.validate()?;
        Ok(())
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig { dt_s: self.dt_s, day_length_s: self.day_length_s, sensor: self.sensor, weights: self.weights }
    }

    pub fn effective_seed(&self) -> u64 {
        self.seed.unwrap_or(self.ga.seed)
    }

    pub fn load_region(&self) -> Result<(RegionConfig, RegionGrid)> {
        let path = self.region.as_ref().ok_or_else(|| AppError::Config("no region file given".into()))?;
        load_region(path, self.earth.r_e)
    }
}

pub fn load_region(path: &Path, r_e: f64) -> Result<(RegionConfig, RegionGrid)> {
    let region: RegionConfig = read_json(path)?;
    let grid = build_grid(&region, r_e)?;
    Ok((region, grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_fills_defaults() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("r.json"), "{}").unwrap();
        let p = dir.path().join("run.json");
        std::fs::write(&p, r#"{"region": "r.json", "ga": {"population": 8}, "seed": 4, "dt_s": 120}"#).unwrap();
        let c = RunConfig::load(&p).unwrap();
        assert_eq!(c.ga.population, 8);
        assert_eq!(c.ga.generations, GaConfig::default().generations);
        assert_eq!(c.effective_seed(), 4);
        assert_eq!(c.dt_s, 120.0);
        assert_eq!(c.region.unwrap(), dir.path().join("r.json"));
    }

    #[test]
    fn missing_region_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.json");
        std::fs::write(&p, r#"{"region": "nope.json"}"#).unwrap();
        assert!(matches!(RunConfig::load(&p), Err(AppError::Config(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.json");
        std::fs::write(&p, r#"{"regoin": "x"}"#).unwrap();
        assert!(matches!(RunConfig::load(&p), Err(AppError::Parse { .. })));
    }
}
