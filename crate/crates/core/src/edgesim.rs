//! LEO to GEO visibility and the relayed edge-computing latency model.
//!
//! An image is split across `n` LEO edge nodes through a GEO relay. The
//! detection time is the sum of thirteen stages (dwell, uplinks, relay hops,
//! processing, return path, downlink), compared against a single satellite
//! that processes the whole image itself.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constellation::Constellation;
use crate::kepler::{eci_position, EarthModel, KeplerError, OrbitalElements};
use crate::math::{acos, cos, log2, sqrt};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EdgeError {
    #[error("geometry: {0}")]
    Geometry(&'static str),
    #[error("edge node count must be at least 1")]
    NoNodes,
    #[error("link budget field {field} must be {requirement}, got {value}")]
    InvalidBudget { field: &'static str, requirement: &'static str, value: f64 },
    #[error(transparent)]
    Propagation(#[from] KeplerError),
}

/// The relay satellite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoSatellite {
    pub elements: OrbitalElements,
}

impl Default for GeoSatellite {
    fn default() -> Self {
        let elements = OrbitalElements::new(42165.0, 0.0002541, 0.0116, 48.4858, 135.8460, 294.4219)
            .expect("constant elements are valid");
        Self { elements }
    }
}

impl GeoSatellite {
    pub fn validate(&self) -> Result<(), EdgeError> {
        let a = self.elements.a_km;
        if !((a - 42165.0).abs() <= 0.01 * 42165.0) {
            return Err(EdgeError::Geometry("relay semi-major axis is not geostationary"));
        }
        Ok(())
    }
}

/// Link and processing parameters. Field names carry their units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkBudget {
    pub leo_data_rate_bps: f64,
    pub geo_bandwidth_hz: f64,
    pub snr: f64,
    /// Size of one image product.
    pub data_amount_bits: f64,
    pub clock_rate_hz: f64,
    /// Instructions to process one image, one per clock cycle.
    pub assembly_lines: f64,
    /// Time to cut the image into segments.
    pub segmentation_overhead_s: f64,
    /// Down-track pixel size.
    pub pixel_size_m: f64,
    /// Cross-track line width over cross-track pixel size.
    pub cross_track_ratio: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            leo_data_rate_bps: 80e6,
            geo_bandwidth_hz: 54e6,
            snr: 210.0,
            data_amount_bits: 559_300.0,
            clock_rate_hz: 200e6,
            assembly_lines: 241_878_560.0,
            segmentation_overhead_s: 1.0,
            pixel_size_m: 5.0,
            cross_track_ratio: 1.0,
        }
    }
}

impl LinkBudget {
    /// Rates, sizes and ratios must be positive; the instruction count and
    /// the segmentation overhead may be zero.
    pub fn validate(&self) -> Result<(), EdgeError> {
        let positive = [
            ("leo_data_rate_bps", self.leo_data_rate_bps),
            ("geo_bandwidth_hz", self.geo_bandwidth_hz),
            ("snr", self.snr),
            ("data_amount_bits", self.data_amount_bits),
            ("clock_rate_hz", self.clock_rate_hz),
            ("pixel_size_m", self.pixel_size_m),
            ("cross_track_ratio", self.cross_track_ratio),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(EdgeError::InvalidBudget { field, requirement: "positive", value });
            }
        }
        for (field, value) in
            [("assembly_lines", self.assembly_lines), ("segmentation_overhead_s", self.segmentation_overhead_s)]
        {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(EdgeError::InvalidBudget { field, requirement: "non-negative", value });
            }
        }
        Ok(())
    }

    /// Shannon capacity of the GEO link, bit/s.
    pub fn geo_rate_bps(&self) -> f64 {
        self.geo_bandwidth_hz * log2(1.0 + self.snr)
    }

    /// Time to run the detector on one whole image, s.
    pub fn processing_s(&self) -> f64 {
        self.assembly_lines / self.clock_rate_hz
    }
}

/// How the LEO to GEO hop length is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    /// Difference of the two orbit radii.
    #[default]
    Radial,
    /// The longest line-of-sight range at which the pair is still visible.
    Slant,
}

/// Orbit radii used by the latency model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkGeometry {
    /// Worst-case (largest) LEO orbit radius, km.
    pub a_leo_km: f64,
    pub a_geo_km: f64,
    /// LEO altitude for the direct downlink, km.
    pub leo_altitude_km: f64,
    pub path: PathMode,
}

impl Default for LinkGeometry {
    fn default() -> Self {
        Self { a_leo_km: 7375.0, a_geo_km: 42165.0, leo_altitude_km: 963.9, path: PathMode::Radial }
    }
}

impl LinkGeometry {
    /// One-way LEO to GEO distance, km.
    pub fn hop_km(&self, r_e: f64) -> Result<f64, EdgeError> {
        match self.path {
            PathMode::Radial => Ok(self.a_geo_km - self.a_leo_km),
            PathMode::Slant => Ok(visibility_threshold(self.a_leo_km, self.a_geo_km, r_e)?.x_km),
        }
    }

    /// Slowest circular speed over the allowed LEO radii, m/s.
    pub fn leo_velocity_ms(&self, earth: &EarthModel) -> f64 {
        sqrt(earth.mu / self.a_leo_km) * 1e3
    }
}

/// Maximum separation at which a LEO and the GEO satellite can see each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityThreshold {
    pub alpha_rad: f64,
    pub x_km: f64,
}

/// `α = acos(R_e / a_leo)` and `x² = a_leo² + a_geo² − 2·a_leo·a_geo·cos(90° + α)`.
/// `a_leo == r_e` is the grazing limit with `α = 0`.
pub fn visibility_threshold(a_leo: f64, a_geo: f64, r_e: f64) -> Result<VisibilityThreshold, EdgeError> {
    if !(r_e > 0.0) || !(a_geo > 0.0) {
        return Err(EdgeError::Geometry("radii must be positive"));
    }
    if !(a_leo >= r_e) {
        return Err(EdgeError::Geometry("LEO orbit radius lies below the Earth's surface"));
    }
    let alpha = acos((r_e / a_leo).min(1.0));
    let x2 = a_leo * a_leo + a_geo * a_geo - 2.0 * a_leo * a_geo * cos(core::f64::consts::FRAC_PI_2 + alpha);
    Ok(VisibilityThreshold { alpha_rad: alpha, x_km: sqrt(x2) })
}

/// Satellites whose distance to the relay at time `t` is below their own
/// visibility threshold.
pub fn count_visible(
    constellation: &Constellation,
    geo: &GeoSatellite,
    t: f64,
    earth: &EarthModel,
) -> Result<usize, EdgeError> {
    let g = eci_position(&geo.elements, earth, t)?;
    let mut count = 0;
    for sat in &constellation.sats {
        let x = visibility_threshold(sat.a_km, geo.elements.a_km, earth.r_e)?.x_km;
        if eci_position(sat, earth, t)?.distance_to(&g) < x {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilitySample {
    pub t_s: f64,
    pub visible: usize,
    pub fraction: f64,
}

/// Visible counts at `t = 0, step, 2·step, …` up to and including `duration`.
pub fn visibility_over_time(
    constellation: &Constellation,
    geo: &GeoSatellite,
    earth: &EarthModel,
    step_s: f64,
    duration_s: f64,
) -> Result<Vec<VisibilitySample>, EdgeError> {
    if !(step_s > 0.0) || !(duration_s >= 0.0) {
        return Err(EdgeError::Geometry("sampling step must be positive"));
    }
    let n = constellation.len().max(1) as f64;
    let steps = (duration_s / step_s + 1e-9) as usize;
    (0..=steps)
        .map(|k| {
            let t_s = k as f64 * step_s;
            let visible = count_visible(constellation, geo, t_s, earth)?;
            Ok(VisibilitySample { t_s, visible, fraction: visible as f64 / n })
        })
        .collect()
}

/// The thirteen stages of a relayed detection, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyBreakdown {
    pub t: [f64; 13],
    pub total: f64,
    pub n_nodes: u64,
}

fn sum(t: &[f64]) -> f64 {
    t.iter().fold(0.0, |acc, v| acc + v)
}

/// Stage times for `n` edge nodes:
///
/// | stage | time |
/// |---|---|
/// | t1 | dwell time plus segmentation |
/// | t2 | LEO uplink of the image |
/// | t3 | LEO to GEO propagation |
/// | t4, t5 | GEO receive and redistribute |
/// | t6 | GEO to LEO propagation |
/// | t7 | node receives its 1/n share |
/// | t8 | node processes its 1/n share |
/// | t9 | node returns its share |
/// | t10 | LEO to GEO propagation |
/// | t11, t12 | GEO receive and send to ground |
/// | t13 | GEO to ground propagation over the GEO orbit radius |
pub fn edge_latency(
    budget: &LinkBudget,
    n: u64,
    geom: &LinkGeometry,
    earth: &EarthModel,
) -> Result<LatencyBreakdown, EdgeError> {
    if n == 0 {
        return Err(EdgeError::NoNodes);
    }
    let mut t = fixed_terms(budget, geom, earth)?;
    let nf = n as f64;
    t[6] = budget.data_amount_bits / nf / budget.leo_data_rate_bps;
    t[7] = budget.assembly_lines / (nf * budget.clock_rate_hz);
    t[8] = t[6];
    Ok(LatencyBreakdown { t, total: sum(&t), n_nodes: n })
}

fn fixed_terms(budget: &LinkBudget, geom: &LinkGeometry, earth: &EarthModel) -> Result<[f64; 13], EdgeError> {
    budget.validate()?;
    let mut t = [0.0; 13];
    t[0] = dwell_time(budget, geom, earth);
    t[1] = budget.data_amount_bits / budget.leo_data_rate_bps;
    t[2] = geom.hop_km(earth.r_e)? * 1e3 / SPEED_OF_LIGHT;
    t[3] = budget.data_amount_bits / budget.geo_rate_bps();
    t[4] = t[3];
    t[5] = t[2];
    t[9] = t[2];
    t[10] = t[4];
    t[11] = t[3];
    t[12] = geom.a_geo_km * 1e3 / SPEED_OF_LIGHT;
    Ok(t)
}

/// `(pixel / v) / ratio + overhead` at the slowest LEO speed.
pub fn dwell_time(budget: &LinkBudget, geom: &LinkGeometry, earth: &EarthModel) -> f64 {
    budget.pixel_size_m / geom.leo_velocity_ms(earth) / budget.cross_track_ratio + budget.segmentation_overhead_s
}

/// Limit of the relayed total as the node count grows without bound.
pub fn latency_asymptote(budget: &LinkBudget, geom: &LinkGeometry, earth: &EarthModel) -> Result<f64, EdgeError> {
    Ok(sum(&fixed_terms(budget, geom, earth)?))
}

/// Stages of on-board processing without the relay, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleSatLatency {
    /// Dwell, processing, downlink transmit, downlink propagation.
    pub t: [f64; 4],
    pub total: f64,
}

pub fn single_sat_latency(
    budget: &LinkBudget,
    geom: &LinkGeometry,
    earth: &EarthModel,
) -> Result<SingleSatLatency, EdgeError> {
    budget.validate()?;
    let t = [
        dwell_time(budget, geom, earth),
        budget.processing_s(),
        budget.data_amount_bits / budget.leo_data_rate_bps,
        geom.leo_altitude_km * 1e3 / SPEED_OF_LIGHT,
    ];
    Ok(SingleSatLatency { t, total: sum(&t) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencySweep {
    pub rows: Vec<SweepRow>,
    pub asymptote_s: f64,
    pub epsilon_s: f64,
    /// Smallest swept `n` whose total is within `epsilon_s` of the asymptote.
    pub plateau: Option<SweepRow>,
    pub single_sat_s: f64,
}

pub const DEFAULT_PLATEAU_EPS: f64 = 0.01;

pub fn latency_sweep(
    budget: &LinkBudget,
    geom: &LinkGeometry,
    earth: &EarthModel,
    nodes: impl IntoIterator<Item = u64>,
    epsilon_s: f64,
) -> Result<LatencySweep, EdgeError> {
    let mut rows = Vec::new();
    for n in nodes {
        rows.push(SweepRow { n, total_s: edge_latency(budget, n, geom, earth)?.total });
    }
    if rows.is_empty() {
        return Err(EdgeError::NoNodes);
    }
    let asymptote_s = latency_asymptote(budget, geom, earth)?;
    let plateau = rows.iter().filter(|r| r.total_s - asymptote_s <= epsilon_s).min_by_key(|r| r.n).copied();
    let single_sat_s = single_sat_latency(budget, geom, earth)?.total;
    Ok(LatencySweep { rows, asymptote_s, epsilon_s, plateau, single_sat_s })
}

#[cfg(test)]
mod tests {
    use alloc::vec;

    use proptest::prelude::*;

    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn defaults() -> (LinkBudget, LinkGeometry, EarthModel) {
        (LinkBudget::default(), LinkGeometry::default(), EarthModel::default())
    }

    #[test]
    fn grazing_limit() {
        let v = visibility_threshold(6371.0, 42165.0, 6371.0).unwrap();
        assert_eq!(v.alpha_rad, 0.0);
        assert!((v.x_km - (6371.0f64.powi(2) + 42165.0f64.powi(2)).sqrt()).abs() < 1e-9);
        assert!(matches!(visibility_threshold(6000.0, 42165.0, 6371.0), Err(EdgeError::Geometry(_))));
    }

    #[test]
    fn threshold_reference_values() {
        let v = visibility_threshold(7334.9, 42165.0, 6371.0).unwrap();
        assert!((v.alpha_rad - 0.518_452_291_755_757_4).abs() < 1e-12);
        assert!((v.x_km - 46_240.708_038_811_29).abs() < 1e-8);
        let v = visibility_threshold(7375.0, 42165.0, 6371.0).unwrap();
        assert!((v.x_km - 46_320.201_474_672_76).abs() < 1e-8);
    }

    #[test]
    fn relay_copies_are_all_visible() {
        let geo = GeoSatellite::default();
        let c =
            Constellation { sats: vec![geo.elements; 7], source: crate::constellation::WalkerChromosome::REFERENCE };
        assert_eq!(count_visible(&c, &geo, 0.0, &EarthModel::default()).unwrap(), 7);
    }

    #[test]
    fn satellite_behind_earth_is_hidden() {
        let geo = GeoSatellite { elements: OrbitalElements::new(42165.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap() };
        let leo = OrbitalElements::new(7334.9, 0.0, 0.0, 0.0, 0.0, 180.0).unwrap();
        let c = Constellation { sats: vec![leo], source: crate::constellation::WalkerChromosome::REFERENCE };
        assert_eq!(count_visible(&c, &geo, 0.0, &EarthModel::default()).unwrap(), 0);
    }

    #[test]
    fn component_times() {
        let (b, g, e) = defaults();
        let l = edge_latency(&b, 1, &g, &e).unwrap();
        assert!(rel(b.geo_rate_bps(), 416_939_356.190_188) < 1e-12);
        assert!(rel(l.t[0], 1.000_680_114_648_334_4) < 1e-12);
        assert!(rel(l.t[1], 0.006_991_25) < 1e-12);
        assert!(rel(l.t[2], 0.116_046_948_719_437_1) < 1e-12);
        assert!(rel(l.t[3], 0.001_341_442_086_711_703_5) < 1e-12);
        assert!(rel(l.t[12], 0.140_647_300_740_300_8) < 1e-12);
        assert!(rel(l.t[7], 1.2093928) < 1e-12);
        assert_eq!(l.t[4], l.t[3]);
        assert_eq!(l.t[5], l.t[2]);
        assert_eq!(l.t[9], l.t[2]);
        assert_eq!(l.t[8], l.t[6]);
    }

    #[test]
    fn totals_at_selected_node_counts() {
        let (b, g, e) = defaults();
        for (n, want) in [(1, 2.725_200_579_893_793), (35, 1.536_778_859_893_793_3), (100, 1.514_059_032_893_793_3)] {
            assert!(rel(edge_latency(&b, n, &g, &e).unwrap().total, want) < 1e-12);
        }
        assert!(rel(latency_asymptote(&b, &g, &e).unwrap(), 1.501_825_279_893_793_3) < 1e-12);
    }

    #[test]
    fn single_satellite_total() {
        let (b, g, e) = defaults();
        let s = single_sat_latency(&b, &g, &e).unwrap();
        assert!(rel(s.total, 2.220_279_388_961_949_4) < 1e-12);
        assert!(rel(s.t[3], 0.003_215_222_9) < 1e-6);
        let bare = LinkBudget { assembly_lines: 0.0, segmentation_overhead_s: 0.0, ..b };
        let s = single_sat_latency(&bare, &g, &e).unwrap();
        assert_eq!(s.t[1], 0.0);
        assert!((s.total - (s.t[0] + s.t[2] + s.t[3])).abs() < 1e-15);
    }

    #[test]
    fn single_node_sweep() {
        let (b, g, e) = defaults();
        let s = latency_sweep(&b, &g, &e, [1], DEFAULT_PLATEAU_EPS).unwrap();
        assert_eq!(s.rows, vec![SweepRow { n: 1, total_s: edge_latency(&b, 1, &g, &e).unwrap().total }]);
        assert!(matches!(latency_sweep(&b, &g, &e, [], 0.01), Err(EdgeError::NoNodes)));
        assert!(matches!(edge_latency(&b, 0, &g, &e), Err(EdgeError::NoNodes)));
    }

    #[test]
    fn plateau_detector() {
        let (b, g, e) = defaults();
        // the 1/n tail drops below 10 ms only past n = 122
        let s = latency_sweep(&b, &g, &e, 1..=200, DEFAULT_PLATEAU_EPS).unwrap();
        assert_eq!(s.plateau.map(|r| r.n), Some(123));
        assert!(latency_sweep(&b, &g, &e, 1..=100, DEFAULT_PLATEAU_EPS).unwrap().plateau.is_none());
        let s = latency_sweep(&b, &g, &e, 1..=100, 0.05).unwrap();
        assert_eq!(s.plateau.map(|r| r.n), Some(25));
    }

    #[test]
    fn faster_clock_lowers_plateau() {
        let (b, g, e) = defaults();
        let fast = LinkBudget { clock_rate_hz: 2.0 * b.clock_rate_hz, ..b };
        let slow = latency_sweep(&b, &g, &e, 1..=300, DEFAULT_PLATEAU_EPS).unwrap();
        let quick = latency_sweep(&fast, &g, &e, 1..=300, DEFAULT_PLATEAU_EPS).unwrap();
        let (ps, pq) = (slow.plateau.unwrap(), quick.plateau.unwrap());
        assert!(pq.n <= ps.n);
        // at the slow plateau's node count the faster clock is strictly quicker
        let at = quick.rows.iter().find(|r| r.n == ps.n).unwrap();
        assert!(at.total_s < ps.total_s);
        assert_eq!(quick.asymptote_s, slow.asymptote_s);
    }

    #[test]
    fn relay_beats_single_satellite_at_35_nodes() {
        let (b, g, e) = defaults();
        let edge = edge_latency(&b, 35, &g, &e).unwrap().total;
        let single = single_sat_latency(&b, &g, &e).unwrap();
        assert!(edge < single.total);
        assert!(single.total >= single.t[1]);
    }

    #[test]
    fn slant_mode_uses_visibility_range() {
        let (b, _, e) = defaults();
        let g = LinkGeometry { path: PathMode::Slant, ..LinkGeometry::default() };
        let l = edge_latency(&b, 1, &g, &e).unwrap();
        assert!(rel(l.t[2], 46_320.201_474_672_76e3 / SPEED_OF_LIGHT) < 1e-12);
    }

    #[test]
    fn bad_budget_rejected() {
        let (_, g, e) = defaults();
        let b = LinkBudget { leo_data_rate_bps: 0.0, ..LinkBudget::default() };
        assert!(matches!(
            edge_latency(&b, 1, &g, &e),
            Err(EdgeError::InvalidBudget { field: "leo_data_rate_bps", .. })
        ));
        let b = LinkBudget { assembly_lines: -1.0, ..LinkBudget::default() };
        assert!(single_sat_latency(&b, &g, &e).is_err());
    }

    #[test]
    fn budget_json_field_names() {
        let j = serde_json::to_value(LinkBudget::default()).unwrap();
        assert_eq!(j["leo_data_rate_bps"], 80e6);
        let b: LinkBudget = serde_json::from_str(r#"{"snr": 100}"#).unwrap();
        assert_eq!(b, LinkBudget { snr: 100.0, ..LinkBudget::default() });
    }

    #[test]
    fn table3_relay_is_geostationary() {
        GeoSatellite::default().validate().unwrap();
        let e = EarthModel::default();
        let p = e.period(42165.0);
        assert!((p - 86_164.0).abs() < 10.0, "{p}");
    }

    proptest! {
        #[test]
        fn totals_never_increase(n in 1u64..100_000, scale in 0.1f64..10.0) {
            let (b, g, e) = defaults();
            let b = LinkBudget { assembly_lines: b.assembly_lines * scale, ..b };
            let a = edge_latency(&b, n, &g, &e).unwrap();
            let c = edge_latency(&b, n + 1, &g, &e).unwrap();
            prop_assert!(a.total >= c.total);
            prop_assert_eq!(a.total, a.t.iter().fold(0.0, |s, v| s + v));
            prop_assert!(a.t.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn large_n_approaches_asymptote() {
        let (b, g, e) = defaults();
        let big = edge_latency(&b, 1_000_000, &g, &e).unwrap().total;
        assert!((big - latency_asymptote(&b, &g, &e).unwrap()).abs() < 1e-4);
    }
}
