//! Side-by-side comparison of published reference numbers with recomputed ones.

use std::path::{Path, PathBuf};

use firesat_core::constellation::{expand_with, GeneBounds, WalkerChromosome};
use firesat_core::coverage::{swath_width, CoverageEvaluator, CoverageReport, EvalConfig, RegionConfig};
use firesat_core::edgesim::{
    edge_latency, latency_sweep, single_sat_latency, GeoSatellite, LatencySweep, LinkBudget, LinkGeometry,
    VisibilitySample, DEFAULT_PLATEAU_EPS,
};
use firesat_core::kepler::EarthModel;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};
use crate::fixtures;
use crate::parallel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayEntry {
    pub quantity: String,
    pub paper_value: f64,
    pub computed_value: f64,
    /// `|computed − reference| / |reference|`.
    pub relative_error: f64,
}

impl ReplayEntry {
    fn new(quantity: &str, paper_value: f64, computed_value: f64) -> Self {
        Self {
            quantity: quantity.into(),
            paper_value,
            computed_value,
            relative_error: (computed_value - paper_value).abs() / paper_value.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub entries: Vec<ReplayEntry>,
    /// Every `subsample`-th satellite was used for coverage.
    pub subsample: usize,
    pub dt_s: f64,
    pub coverage: CoverageSummary,
    pub sweep: LatencySweep,
    pub geo_visibility: Vec<VisibilitySample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSummary {
    pub grid_points: u32,
    pub p_cov: u32,
    pub p_cov_fraction: f64,
    pub c_mean: f64,
    pub min_visible: u32,
    pub r_mean_min: f64,
    pub n_sats_evaluated: u32,
}

impl From<&CoverageReport> for CoverageSummary {
    fn from(r: &CoverageReport) -> Self {
        Self {
            grid_points: r.grid_points,
            p_cov: r.p_cov,
            p_cov_fraction: r.p_cov_fraction,
            c_mean: r.c_mean,
            min_visible: r.column_counts.iter().copied().min().unwrap_or(0),
            r_mean_min: r.r_mean_min,
            n_sats_evaluated: r.n_sats,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReplayOptions {
    pub data_dir: PathBuf,
    pub subsample: usize,
    pub dt_s: f64,
    pub earth: EarthModel,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self { data_dir: fixtures::default_data_dir(), subsample: 1, dt_s: 60.0, earth: EarthModel::default() }
    }
}

fn fixture<T: DeserializeOwned>(dir: &Path, name: &str) -> Result<T> {
    let path = dir.join(name);
    let bytes = std::fs::read(&path).map_err(|_| AppError::FixtureMissing { path: path.clone() })?;
    serde_json::from_slice(&bytes).map_err(|_| AppError::FixtureMissing { path })
}

pub fn run(opts: &ReplayOptions) -> Result<ReplayReport> {
    let earth = opts.earth;
    let region: RegionConfig = fixture(&opts.data_dir, fixtures::REGION)?;
    let chromosome: WalkerChromosome = fixture(&opts.data_dir, fixtures::REFERENCE_CHROMOSOME)?;
    let budget: LinkBudget = fixture(&opts.data_dir, fixtures::BUDGET)?;
    let geometry = LinkGeometry::default();

    let constellation = expand_with(&chromosome, &GeneBounds::permissive_phasing())?;
    let eval = EvalConfig { dt_s: opts.dt_s, ..EvalConfig::default() };
    let grid = firesat_core::coverage::build_grid(&region, earth.r_e)?;
    let ev = CoverageEvaluator::new(grid, earth, eval)?;
    let sample = constellation.subsample(opts.subsample.max(1));
    let cov = parallel::evaluate_coverage(&ev, &sample)?;

    let sweep = latency_sweep(&budget, &geometry, &earth, 1..=100, DEFAULT_PLATEAU_EPS)?;
    let at35 = edge_latency(&budget, 35, &geometry, &earth)?.total;
    let single = single_sat_latency(&budget, &geometry, &earth)?.total;
    let geo = GeoSatellite::default();
    let vis = parallel::visibility_over_time(&constellation, &geo, &earth, 3600.0, 86_400.0)?;
    let vis_min = vis.iter().map(|v| v.fraction).fold(f64::INFINITY, f64::min);

    let swath = swath_width(chromosome.altitude_km(&earth), eval.sensor.half_fov_deg);
    let entries = vec![
        ReplayEntry::new("swath_width_km", 236.4, swath),
        ReplayEntry::new("total_satellites", 3990.0, constellation.len() as f64),
        ReplayEntry::new("coverage_fraction", 1.0, cov.p_cov_fraction),
        ReplayEntry::new("revisit_min", 6.0, cov.r_mean_min),
        ReplayEntry::new("min_satellites_over_region", 160.0, CoverageSummary::from(&cov).min_visible as f64),
        ReplayEntry::new("latency_plateau_s", 1.39, at35),
        ReplayEntry::new("single_satellite_latency_s", 2.22, single),
        ReplayEntry::new("geo_visible_fraction", 0.95, vis_min),
    ];
    Ok(ReplayReport {
        entries,
        subsample: opts.subsample.max(1),
        dt_s: opts.dt_s,
        coverage: CoverageSummary::from(&cov),
        sweep,
        geo_visibility: vis,
    })
}
