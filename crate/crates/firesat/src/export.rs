//! CSV emitters for plotting with external tools.

use std::path::Path;

use firesat_core::constellation::Constellation;
use firesat_core::coverage::CoverageReport;
use firesat_core::edgesim::{LatencyBreakdown, VisibilitySample};
use firesat_core::firedetect::FireReport;
use firesat_core::kepler::GeodeticPoint;
use firesat_core::optimizer::GenerationStats;
use serde::Serialize;

use crate::error::Result;
use crate::io::write_csv;

#[derive(Debug, Serialize)]
pub struct ElementRow {
    pub index: usize,
    pub plane: u32,
    pub slot: u32,
    pub a_km: f64,
    pub e: f64,
    pub i_deg: f64,
    pub raan_deg: f64,
    pub argp_deg: f64,
    pub ma0_deg: f64,
}

pub fn elements(path: &Path, c: &Constellation) -> Result<()> {
    let n = c.source.per_plane.max(1);
    write_csv(
        path,
        c.sats.iter().enumerate().map(|(k, s)| ElementRow {
            index: k,
            plane: k as u32 / n,
            slot: k as u32 % n,
            a_km: s.a_km,
            e: s.e,
            i_deg: s.i_deg,
            raan_deg: s.raan_deg,
            argp_deg: s.argp_deg,
            ma0_deg: s.ma0_deg,
        }),
    )
}

#[derive(Debug, Serialize)]
pub struct HourlyRow {
    pub hour: usize,
    pub mean_visible: f64,
}

pub fn hourly_visibility(path: &Path, r: &CoverageReport) -> Result<()> {
    write_csv(
        path,
        r.hourly_mean_visible().into_iter().enumerate().map(|(hour, mean_visible)| HourlyRow { hour, mean_visible }),
    )
}

#[derive(Debug, Serialize)]
pub struct TrackRow {
    pub sat: usize,
    pub t_s: f64,
    pub lat_deg: f64,
    pub lon_deg: f64,
}

/// `tracks` pairs a satellite index with its sampled sub-satellite points.
pub fn ground_tracks(path: &Path, tracks: &[(usize, Vec<GeodeticPoint>)]) -> Result<()> {
    write_csv(
        path,
        tracks.iter().flat_map(|(sat, pts)| {
            pts.iter().map(move |p| TrackRow { sat: *sat, t_s: p.t, lat_deg: p.lat, lon_deg: p.lon })
        }),
    )
}

#[derive(Debug, Serialize)]
pub struct SweepCsvRow {
    pub n: u64,
    pub total_s: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub t5: f64,
    pub t6: f64,
    pub t7: f64,
    pub t8: f64,
    pub t9: f64,
    pub t10: f64,
    pub t11: f64,
    pub t12: f64,
    pub t13: f64,
}

impl From<&LatencyBreakdown> for SweepCsvRow {
    fn from(b: &LatencyBreakdown) -> Self {
        let t = b.t;
        Self {
            n: b.n_nodes,
            total_s: b.total,
            t1: t[0],
            t2: t[1],
            t3: t[2],
            t4: t[3],
            t5: t[4],
            t6: t[5],
            t7: t[6],
            t8: t[7],
            t9: t[8],
            t10: t[9],
            t11: t[10],
            t12: t[11],
            t13: t[12],
        }
    }
}

pub fn latency_sweep(path: &Path, rows: &[LatencyBreakdown]) -> Result<()> {
    write_csv(path, rows.iter().map(SweepCsvRow::from))
}

#[derive(Debug, Serialize)]
pub struct FireRow {
    pub row: usize,
    pub col: usize,
    pub lat: f64,
    pub lon: f64,
    pub class: &'static str,
}

pub fn fires(path: &Path, r: &FireReport) -> Result<()> {
    write_csv(
        path,
        r.fire_pixels.iter().map(|f| FireRow {
            row: f.row,
            col: f.col,
            lat: f.lat,
            lon: f.lon,
            class: f.class.as_str(),
        }),
    )
}

pub fn ga_stats(path: &Path, history: &[GenerationStats]) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        generation: usize,
        best_fitness: f64,
        best_so_far: f64,
        mean_fitness: f64,
        front0_size: usize,
        population_hash: String,
    }
    write_csv(
        path,
        history.iter().map(|h| Row {
            generation: h.generation,
            best_fitness: h.best_fitness,
            best_so_far: h.best_so_far,
            mean_fitness: h.mean_fitness,
            front0_size: h.front0_size,
            population_hash: format!("{:016x}", h.population_hash),
        }),
    )
}

pub fn geo_visibility(path: &Path, samples: &[VisibilitySample]) -> Result<()> {
    write_csv(path, samples)
}
