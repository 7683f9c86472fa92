//! Constellation coverage over a region for one simulated day.
//!
//! Each satellite is propagated on a fixed time step. A step counts as an
//! instance when the sub-satellite point lies inside the area-of-interest
//! ring; during instances every lattice point within half a swath of the
//! sub-satellite point is marked covered. From that:
//!
//! * `C`: mean over time steps of the number of satellites over the region;
//! * `P_cov`: lattice points covered at least once;
//! * `R`: mean length of the gaps between consecutive constellation transits;
//! * fitness `w_c/C + w_r·R[min] + w_p/P_cov + w_n·N`.

pub mod grid;
pub mod polygon;

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use grid::{build_grid, great_circle_km, GridIndex, RegionConfig, RegionGrid, FOOTPRINT_EPS_KM};
pub use polygon::{BoundingBox, GeoPolygon, LatLon};

use crate::constellation::Constellation;
use crate::kepler::{subsatellite_point, EarthModel, GeodeticPoint, KeplerError, OrbitalElements};
use crate::math::{floor, rad, tan};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverageError {
    #[error("degenerate region: {0}")]
    DegenerateRegion(&'static str),
    #[error("time step must be positive and the day length non-negative")]
    InvalidTimeStep,
    #[error("constellation is empty")]
    EmptyConstellation,
    #[error("sensor half field of view must lie in (0, 90) degrees")]
    InvalidSensor,
    #[error("zero coverage: no satellite passes over the region or no lattice point is seen")]
    ZeroCoverage,
    #[error(transparent)]
    Propagation(#[from] KeplerError),
}

/// Imaging sensor geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorModel {
    /// Half of the full field of view, degrees.
    pub half_fov_deg: f64,
    pub pixel_size_m: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self { half_fov_deg: 6.99, pixel_size_m: 5.0 }
    }
}

/// Cross-track swath for altitude `h_km` and half field of view `theta_deg`.
pub fn swath_width(h_km: f64, theta_deg: f64) -> f64 {
    2.0 * h_km * tan(rad(theta_deg))
}

/// Whether `gp` lies within half a swath (great-circle, inclusive) of the sub-satellite point.
pub fn footprint_visible(sat: &GeodeticPoint, gp: LatLon, swath_km: f64, r_e: f64) -> bool {
    great_circle_km(LatLon::new(sat.lat, sat.lon), gp, r_e) <= swath_km / 2.0 + FOOTPRINT_EPS_KM
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitnessWeights {
    pub inv_c: f64,
    /// Multiplies R expressed in minutes.
    pub revisit: f64,
    pub inv_p: f64,
    pub n: f64,
}

impl Default for FitnessWeights {
    fn default() -> Self {
        Self { inv_c: 1.0, revisit: 0.01, inv_p: 1.0, n: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub dt_s: f64,
    pub day_length_s: f64,
    pub sensor: SensorModel,
    pub weights: FitnessWeights,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { dt_s: 60.0, day_length_s: 86_400.0, sensor: SensorModel::default(), weights: FitnessWeights::default() }
    }
}

impl EvalConfig {
    /// Number of sampled instants, `floor(day/dt) + 1`.
    pub fn steps(&self) -> usize {
        floor(self.day_length_s / self.dt_s) as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageStatus {
    Feasible,
    ZeroCoverage,
    SwathTooNarrow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Mean number of satellites over the region per time step.
    pub c_mean: f64,
    /// Lattice points covered at least once.
    pub p_cov: u32,
    pub p_cov_fraction: f64,
    /// Mean gap between constellation transits, seconds.
    pub r_mean_s: f64,
    pub r_mean_min: f64,
    pub n_sats: u32,
    #[serde(with = "crate::serde_float")]
    pub fitness: f64,
    pub swath_km: f64,
    pub swath_ok: bool,
    pub status: CoverageStatus,
    pub dt_s: f64,
    pub steps: u32,
    pub grid_points: u32,
    /// Satellites over the region at each time step.
    pub column_counts: Vec<u32>,
    /// Covering samples per lattice point.
    pub point_hits: Vec<u32>,
}

impl CoverageReport {
    /// Minimisation objectives `(1/C, R[min], 1/P_cov, N)`; all `+inf` when infeasible.
    pub fn objectives(&self) -> [f64; 4] {
        if self.status != CoverageStatus::Feasible {
            return [f64::INFINITY; 4];
        }
        [1.0 / self.c_mean, self.r_mean_min, 1.0 / self.p_cov as f64, self.n_sats as f64]
    }

    pub fn require_coverage(&self) -> Result<(), CoverageError> {
        match self.status {
            CoverageStatus::ZeroCoverage => Err(CoverageError::ZeroCoverage),
            _ => Ok(()),
        }
    }

    /// Mean satellites over the region within each hour of the day.
    pub fn hourly_mean_visible(&self) -> Vec<f64> {
        let per_hour = (3600.0 / self.dt_s).max(1.0);
        let mut sums: Vec<(u64, u32)> = Vec::new();
        for (j, &c) in self.column_counts.iter().enumerate() {
            let hour = floor(j as f64 / per_hour) as usize;
            if hour >= sums.len() {
                sums.resize(hour + 1, (0, 0));
            }
            sums[hour].0 += c as u64;
            sums[hour].1 += 1;
        }
        sums.into_iter().map(|(s, n)| s as f64 / n as f64).collect()
    }
}

/// Mean length, in seconds, of the runs of invisible steps that sit between
/// two visible steps. Leading and trailing runs are ignored; 0 when there is
/// no interior gap.
pub fn mean_transit_gap(visible: &[bool], dt: f64) -> f64 {
    let Some(first) = visible.iter().position(|&v| v) else {
        return 0.0;
    };
    let last = visible.iter().rposition(|&v| v).unwrap_or(first);
    let (mut gaps, mut total, mut run) = (0u64, 0u64, 0u64);
    for &v in &visible[first..=last] {
        if v {
            if run > 0 {
                gaps += 1;
                total += run;
            }
            run = 0;
        } else {
            run += 1;
        }
    }
    if gaps == 0 {
        0.0
    } else {
        total as f64 * dt / gaps as f64
    }
}

/// One satellite's contribution over the day.
#[derive(Debug, Clone, PartialEq)]
pub struct SatelliteTrace {
    pub visible: Vec<bool>,
    /// Indices of covered lattice points, one entry per covering sample.
    pub hits: Vec<u32>,
    pub swath_km: f64,
}

/// Grid, spatial index and settings prepared once and shared across evaluations.
#[derive(Debug, Clone)]
pub struct CoverageEvaluator {
    pub grid: RegionGrid,
    pub earth: EarthModel,
    pub config: EvalConfig,
    index: GridIndex,
    area_bbox: BoundingBox,
}

impl CoverageEvaluator {
    pub fn new(grid: RegionGrid, earth: EarthModel, config: EvalConfig) -> Result<Self, CoverageError> {
        if !(config.dt_s > 0.0) || !(config.day_length_s >= 0.0) {
            return Err(CoverageError::InvalidTimeStep);
        }
        if !(config.sensor.half_fov_deg > 0.0 && config.sensor.half_fov_deg < 90.0) {
            return Err(CoverageError::InvalidSensor);
        }
        let index = GridIndex::new(&grid.points, 1.0);
        let area_bbox = grid.area.bbox();
        Ok(Self { grid, earth, config, index, area_bbox })
    }

    pub fn steps(&self) -> usize {
        self.config.steps()
    }

    pub fn swath_for(&self, sat: &OrbitalElements) -> f64 {
        swath_width(sat.a_km - self.earth.r_e, self.config.sensor.half_fov_deg)
    }

    fn over_region(&self, p: LatLon) -> bool {
        self.area_bbox.contains(p) && self.grid.over_region(p)
    }

    pub fn trace(&self, sat: &OrbitalElements) -> Result<SatelliteTrace, KeplerError> {
        let steps = self.steps();
        let swath_km = self.swath_for(sat);
        let mut visible = vec![false; steps];
        let mut hits = Vec::new();
        for (j, slot) in visible.iter_mut().enumerate() {
            let g = subsatellite_point(sat, &self.earth, j as f64 * self.config.dt_s)?;
            let p = LatLon::new(g.lat, g.lon);
            if self.over_region(p) {
                *slot = true;
                self.index.for_each_within(p, swath_km / 2.0, self.earth.r_e, |i| hits.push(i));
            }
        }
        Ok(SatelliteTrace { visible, hits, swath_km })
    }

    pub fn accumulator(&self) -> CoverageAccumulator {
        CoverageAccumulator {
            column_counts: vec![0; self.steps()],
            point_hits: vec![0; self.grid.points.len()],
            n_sats: 0,
            swath_min: f64::INFINITY,
        }
    }

    pub fn evaluate(&self, constellation: &Constellation) -> Result<CoverageReport, CoverageError> {
        if constellation.is_empty() {
            return Err(CoverageError::EmptyConstellation);
        }
        let mut acc = self.accumulator();
        for sat in &constellation.sats {
            acc.add(&self.trace(sat)?);
        }
        Ok(acc.finish(self))
    }
}

/// Order-independent reduction of [`SatelliteTrace`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageAccumulator {
    pub column_counts: Vec<u32>,
    pub point_hits: Vec<u32>,
    pub n_sats: u32,
    pub swath_min: f64,
}

impl CoverageAccumulator {
    pub fn add(&mut self, trace: &SatelliteTrace) {
        for (c, &v) in self.column_counts.iter_mut().zip(&trace.visible) {
            *c += v as u32;
        }
        for &i in &trace.hits {
            self.point_hits[i as usize] += 1;
        }
        self.n_sats += 1;
        self.swath_min = self.swath_min.min(trace.swath_km);
    }

    pub fn merge(&mut self, other: &CoverageAccumulator) {
        for (a, b) in self.column_counts.iter_mut().zip(&other.column_counts) {
            *a += b;
        }
        for (a, b) in self.point_hits.iter_mut().zip(&other.point_hits) {
            *a += b;
        }
        self.n_sats += other.n_sats;
        self.swath_min = self.swath_min.min(other.swath_min);
    }

    pub fn finish(&self, ev: &CoverageEvaluator) -> CoverageReport {
        let cfg = &ev.config;
        let steps = self.column_counts.len();
        let total: u64 = self.column_counts.iter().map(|&c| c as u64).sum();
        let c_mean = total as f64 / steps as f64;
        let p_cov = self.point_hits.iter().filter(|&&h| h > 0).count() as u32;
        let union: Vec<bool> = self.column_counts.iter().map(|&c| c > 0).collect();
        let r_mean_s = mean_transit_gap(&union, cfg.dt_s);
        let r_mean_min = r_mean_s / 60.0;
        let swath_km = if self.swath_min.is_finite() { self.swath_min } else { 0.0 };
        let swath_ok = swath_km >= 2.0 * ev.grid.spacing_km;
        let status = if c_mean == 0.0 || p_cov == 0 {
            CoverageStatus::ZeroCoverage
        } else if !swath_ok {
            CoverageStatus::SwathTooNarrow
        } else {
            CoverageStatus::Feasible
        };
        let w = &cfg.weights;
        let fitness = if status == CoverageStatus::Feasible {
            w.inv_c / c_mean + w.revisit * r_mean_min + w.inv_p / p_cov as f64 + w.n * self.n_sats as f64
        } else {
            f64::INFINITY
        };
        let grid_points = ev.grid.points.len() as u32;
        CoverageReport {
            c_mean,
            p_cov,
            p_cov_fraction: if grid_points == 0 { 0.0 } else { p_cov as f64 / grid_points as f64 },
            r_mean_s,
            r_mean_min,
            n_sats: self.n_sats,
            fitness,
            swath_km,
            swath_ok,
            status,
            dt_s: cfg.dt_s,
            steps: steps as u32,
            grid_points,
            column_counts: self.column_counts.clone(),
            point_hits: self.point_hits.clone(),
        }
    }
}

/// Builds an evaluator and scores `constellation` in one call.
pub fn evaluate(
    constellation: &Constellation,
    grid: &RegionGrid,
    earth: &EarthModel,
    config: &EvalConfig,
) -> Result<CoverageReport, CoverageError> {
    CoverageEvaluator::new(grid.clone(), *earth, *config)?.evaluate(constellation)
}

#[cfg(test)]
mod tests;
