//! Region lattice construction and a bucketed spatial index over it.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::polygon::{BoundingBox, GeoPolygon, LatLon};
use super::CoverageError;
use crate::math::{asin_clamped, cos, deg, fabs, floor, rad, sin, sqrt};

/// Editable description of the area of interest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionConfig {
    #[serde(default)]
    pub name: String,
    /// Outer ring as `[lat, lon]` pairs, degrees.
    pub area_of_interest: Vec<[f64; 2]>,
    /// Rings whose lattice points are excluded from the point count.
    #[serde(default)]
    pub exclusions: Vec<Vec<[f64; 2]>>,
    /// Lattice spacing, km.
    #[serde(default = "default_spacing")]
    pub spacing_km: f64,
}

fn default_spacing() -> f64 {
    22.2
}

fn ring(pairs: &[[f64; 2]]) -> GeoPolygon {
    GeoPolygon::new(pairs.iter().map(|p| LatLon::new(p[0], p[1])).collect())
}

impl RegionConfig {
    pub fn area_polygon(&self) -> GeoPolygon {
        ring(&self.area_of_interest)
    }

    pub fn exclusion_polygons(&self) -> Vec<GeoPolygon> {
        self.exclusions.iter().map(|r| ring(r)).collect()
    }
}

/// Lattice points inside the area of interest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    /// Points counted towards coverage.
    pub points: Vec<LatLon>,
    /// Lattice points that fell inside an exclusion ring.
    pub excluded: Vec<LatLon>,
    pub spacing_km: f64,
    pub area: GeoPolygon,
    pub exclusions: Vec<GeoPolygon>,
}

impl RegionGrid {
    /// Whether a sub-satellite point counts as "over the region".
    pub fn over_region(&self, p: LatLon) -> bool {
        self.area.contains(p)
    }
}

/// Great-circle distance by the haversine formula, km.
pub fn great_circle_km(a: LatLon, b: LatLon, r_e: f64) -> f64 {
    let (p1, p2) = (rad(a.lat), rad(b.lat));
    let dp = p2 - p1;
    let dl = rad(b.lon - a.lon);
    let s1 = sin(dp / 2.0);
    let s2 = sin(dl / 2.0);
    let h = s1 * s1 + cos(p1) * cos(p2) * s2 * s2;
    2.0 * r_e * asin_clamped(sqrt(h))
}

/// Builds the lattice: rows `spacing_km` apart in latitude, and within each row
/// points `spacing_km` apart along the parallel, clipped to the area ring and
/// split against the exclusion rings.
pub fn build_grid(config: &RegionConfig, r_e: f64) -> Result<RegionGrid, CoverageError> {
    let area = config.area_polygon();
    if area.ring.len() < 3 || fabs(area.signed_area()) < 1e-12 {
        return Err(CoverageError::DegenerateRegion("area of interest has zero area"));
    }
    if !(config.spacing_km > 0.0) {
        return Err(CoverageError::DegenerateRegion("grid spacing must be positive"));
    }
    let exclusions = config.exclusion_polygons();
    let bb = area.bbox();
    let dlat = deg(config.spacing_km / r_e);

    let mut points = Vec::new();
    let mut excluded = Vec::new();
    let rows = floor((bb.lat_max - bb.lat_min) / dlat) as usize + 1;
    for r in 0..rows {
        let lat = bb.lat_min + r as f64 * dlat;
        let c = cos(rad(lat));
        if c < 1e-9 {
            continue;
        }
        let dlon = deg(config.spacing_km / (r_e * c));
        let cols = floor((bb.lon_max - bb.lon_min) / dlon) as usize + 1;
        for k in 0..cols {
            let p = LatLon::new(lat, bb.lon_min + k as f64 * dlon);
            if !area.contains(p) {
                continue;
            }
            if exclusions.iter().any(|x| x.contains(p)) {
                excluded.push(p);
            } else {
                points.push(p);
            }
        }
    }
    if points.is_empty() {
        return Err(CoverageError::DegenerateRegion("no lattice points remain after exclusion"));
    }
    Ok(RegionGrid { points, excluded, spacing_km: config.spacing_km, area, exclusions })
}

/// Uniform lat/lon buckets for radius queries over a point set.
#[derive(Debug, Clone)]
pub struct GridIndex {
    bbox: BoundingBox,
    cell_deg: f64,
    rows: usize,
    cols: usize,
    cells: Vec<Vec<u32>>,
    points: Vec<LatLon>,
}

impl GridIndex {
    pub fn new(points: &[LatLon], cell_deg: f64) -> Self {
        let mut bbox = BoundingBox {
            lat_min: f64::INFINITY,
            lat_max: f64::NEG_INFINITY,
            lon_min: f64::INFINITY,
            lon_max: f64::NEG_INFINITY,
        };
        for p in points {
            bbox.lat_min = bbox.lat_min.min(p.lat);
            bbox.lat_max = bbox.lat_max.max(p.lat);
            bbox.lon_min = bbox.lon_min.min(p.lon);
            bbox.lon_max = bbox.lon_max.max(p.lon);
        }
        if points.is_empty() {
            bbox = BoundingBox { lat_min: 0.0, lat_max: 0.0, lon_min: 0.0, lon_max: 0.0 };
        }
        let rows = floor((bbox.lat_max - bbox.lat_min) / cell_deg) as usize + 1;
        let cols = floor((bbox.lon_max - bbox.lon_min) / cell_deg) as usize + 1;
        let mut cells = vec![Vec::new(); rows * cols];
        for (i, p) in points.iter().enumerate() {
            let r = floor((p.lat - bbox.lat_min) / cell_deg) as usize;
            let c = floor((p.lon - bbox.lon_min) / cell_deg) as usize;
            cells[r.min(rows - 1) * cols + c.min(cols - 1)].push(i as u32);
        }
        Self { bbox, cell_deg, rows, cols, cells, points: points.to_vec() }
    }

    /// Calls `hit` with the index of every point within `radius_km` of `center`.
    pub fn for_each_within(&self, center: LatLon, radius_km: f64, r_e: f64, mut hit: impl FnMut(u32)) {
        if self.points.is_empty() {
            return;
        }
        let dlat = deg(radius_km / r_e);
        let lat_lo = center.lat - dlat;
        let lat_hi = center.lat + dlat;
        if lat_hi < self.bbox.lat_min || lat_lo > self.bbox.lat_max {
            return;
        }
        let extreme = fabs(lat_lo).max(fabs(lat_hi));
        let (lon_lo, lon_hi) = if extreme >= 89.0 || dlat >= 45.0 {
            (self.bbox.lon_min, self.bbox.lon_max)
        } else {
            let dlon = deg(radius_km / (r_e * cos(rad(extreme))));
            (center.lon - dlon, center.lon + dlon)
        };
        // the query window may wrap across the antimeridian
        let windows = lon_windows(lon_lo, lon_hi);
        let r0 = self.row_of(lat_lo);
        let r1 = self.row_of(lat_hi);
        for (wlo, whi) in windows.into_iter().flatten() {
            if whi < self.bbox.lon_min || wlo > self.bbox.lon_max {
                continue;
            }
            let c0 = self.col_of(wlo);
            let c1 = self.col_of(whi);
            for r in r0..=r1 {
                for c in c0..=c1 {
                    for &i in &self.cells[r * self.cols + c] {
                        if great_circle_km(center, self.points[i as usize], r_e) <= radius_km + FOOTPRINT_EPS_KM {
                            hit(i);
                        }
                    }
                }
            }
        }
    }

    fn row_of(&self, lat: f64) -> usize {
        let r = floor((lat - self.bbox.lat_min) / self.cell_deg);
        (r.max(0.0) as usize).min(self.rows - 1)
    }

    fn col_of(&self, lon: f64) -> usize {
        let c = floor((lon - self.bbox.lon_min) / self.cell_deg);
        (c.max(0.0) as usize).min(self.cols - 1)
    }
}

fn lon_windows(lo: f64, hi: f64) -> [Option<(f64, f64)>; 2] {
    if hi - lo >= 360.0 {
        [Some((-180.0, 180.0)), None]
    } else if lo < -180.0 {
        [Some((-180.0, hi)), Some((lo + 360.0, 180.0))]
    } else if hi > 180.0 {
        [Some((lo, 180.0)), Some((-180.0, hi - 360.0))]
    } else {
        [Some((lo, hi)), None]
    }
}

/// Slack on the inclusive footprint boundary, km.
pub const FOOTPRINT_EPS_KM: f64 = 1e-9;
