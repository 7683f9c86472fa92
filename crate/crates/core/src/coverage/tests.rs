use super::*;
use crate::constellation::{expand, WalkerChromosome};
use crate::kepler::{ecef_to_geodetic, eci_position, eci_to_ecef};
use alloc::vec;
use proptest::prelude::*;

const R_E: f64 = 6371.0;

/// Even-odd ray casting, written independently of the winding-number test.
fn ray_cast(ring: &[LatLon], p: LatLon) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        // boundary points count as inside
        let cross = (b.lon - a.lon) * (p.lat - a.lat) - (p.lon - a.lon) * (b.lat - a.lat);
        if cross.abs() < 1e-12
            && p.lon >= a.lon.min(b.lon)
            && p.lon <= a.lon.max(b.lon)
            && p.lat >= a.lat.min(b.lat)
            && p.lat <= a.lat.max(b.lat)
        {
            return true;
        }
        if (a.lat > p.lat) != (b.lat > p.lat) {
            let x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
            if p.lon < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

struct Brute {
    c: f64,
    p: u32,
    r: f64,
    hits: Vec<u32>,
    columns: Vec<u32>,
}

/// Loops over every (time, satellite, grid point) triple directly.
fn brute_force(sats: &[OrbitalElements], grid: &RegionGrid, cfg: &EvalConfig) -> Brute {
    let earth = EarthModel::default();
    let steps = (cfg.day_length_s / cfg.dt_s).floor() as usize + 1;
    let mut columns = vec![0u32; steps];
    let mut hits = vec![0u32; grid.points.len()];
    for (j, col) in columns.iter_mut().enumerate() {
        let t = j as f64 * cfg.dt_s;
        for sat in sats {
            let eci = eci_position(sat, &earth, t).unwrap();
            let g = ecef_to_geodetic(&eci_to_ecef(&eci, &earth), &earth);
            if !ray_cast(&grid.area.ring, LatLon::new(g.lat, g.lon)) {
                continue;
            }
            *col += 1;
            let swath = 2.0 * (sat.a_km - R_E) * cfg.sensor.half_fov_deg.to_radians().tan();
            for (k, gp) in grid.points.iter().enumerate() {
                if footprint_visible(&g, *gp, swath, R_E) {
                    hits[k] += 1;
                }
            }
        }
    }
    let c = columns.iter().sum::<u32>() as f64 / steps as f64;
    let p = hits.iter().filter(|&&h| h > 0).count() as u32;
    // gaps between consecutive visible instants, minus the step itself
    let visible: Vec<usize> = (0..steps).filter(|&j| columns[j] > 0).collect();
    let gaps: Vec<usize> = visible.windows(2).map(|w| w[1] - w[0] - 1).filter(|&g| g > 0).collect();
    let r = if gaps.is_empty() { 0.0 } else { gaps.iter().sum::<usize>() as f64 * cfg.dt_s / gaps.len() as f64 };
    Brute { c, p, r, hits, columns }
}

fn region_grid(area: GeoPolygon, points: Vec<LatLon>, spacing_km: f64) -> RegionGrid {
    RegionGrid { points, excluded: vec![], spacing_km, area, exclusions: vec![] }
}

fn eastern_box() -> GeoPolygon {
    GeoPolygon::rectangle(-45.0, -5.0, 110.0, 160.0)
}

#[test]
fn swath_cases() {
    let s = swath_width(963.9, 6.99);
    assert!(((s - 236.4) / 236.4).abs() < 1e-3, "{s}");
    assert!(swath_width(963.9, 1e-12) < 1e-9);
    assert!((swath_width(500.0, 45.0) - 1000.0).abs() < 1e-9);
}

#[test]
fn footprint_cases() {
    let sat = GeodeticPoint { lat: -30.0, lon: 140.0, t: 0.0 };
    assert!(footprint_visible(&sat, LatLon::new(-30.0, 140.0), 236.4, R_E));
    let d200 = (200.0 / R_E).to_degrees();
    assert!(!footprint_visible(&sat, LatLon::new(-30.0 + d200, 140.0), 236.4, R_E));
    let d22 = (22.2 / R_E).to_degrees();
    assert!(footprint_visible(&sat, LatLon::new(-30.0 + d22, 140.0), 44.4, R_E));
    assert!(!footprint_visible(&sat, LatLon::new(-30.0 + d22 * 1.001, 140.0), 44.4, R_E));
}

#[test]
fn disjoint_geometry_gives_infinite_fitness() {
    let c = Constellation {
        sats: vec![OrbitalElements::new(7000.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap()],
        source: WalkerChromosome { a_km: 7000.0, e: 0.0, i_deg: 0.0, planes: 1, phasing: 1, per_plane: 1 },
    };
    let polar = GeoPolygon::rectangle(80.0, 89.0, -180.0, 180.0);
    let grid = region_grid(polar, vec![LatLon::new(85.0, 0.0)], 22.2);
    let r = evaluate(&c, &grid, &EarthModel::default(), &EvalConfig::default()).unwrap();
    assert_eq!(r.c_mean, 0.0);
    assert!(r.fitness.is_infinite());
    assert_eq!(r.status, CoverageStatus::ZeroCoverage);
    assert_eq!(r.objectives(), [f64::INFINITY; 4]);
    assert_eq!(r.require_coverage(), Err(CoverageError::ZeroCoverage));
}

#[test]
fn whole_globe_saturates() {
    let globe = RegionConfig {
        name: "globe".into(),
        area_of_interest: vec![[-89.0, -180.0], [-89.0, 180.0], [89.0, 180.0], [89.0, -180.0]],
        exclusions: vec![],
        spacing_km: 1500.0,
    };
    let grid = build_grid(&globe, R_E).unwrap();
    let chrom = WalkerChromosome { a_km: 7000.0, e: 0.0, i_deg: 30.0, planes: 2, phasing: 1, per_plane: 2 };
    let c = expand(&chrom).unwrap();
    let mut last_p = 0;
    for hours in [1.0, 6.0, 24.0] {
        let cfg = EvalConfig {
            day_length_s: hours * 3600.0,
            sensor: SensorModel { half_fov_deg: 80.0, pixel_size_m: 5.0 },
            ..EvalConfig::default()
        };
        let r = evaluate(&c, &grid, &EarthModel::default(), &cfg).unwrap();
        assert_eq!(r.c_mean, 4.0);
        assert!(r.r_mean_s <= cfg.dt_s);
        assert!(r.p_cov >= last_p);
        assert!(r.swath_ok);
        last_p = r.p_cov;
    }
}

fn toy_points(n: usize) -> Vec<LatLon> {
    // deterministic scatter inside the eastern box
    (0..n)
        .map(|k| {
            let u = (k as f64 * 0.618_033_988_75).fract();
            let v = (k as f64 * 0.754_877_666_25 + 0.1).fract();
            LatLon::new(-43.0 + 36.0 * u, 112.0 + 46.0 * v)
        })
        .collect()
}

#[test]
fn toy_constellation_matches_brute_force() {
    let chrom = WalkerChromosome { a_km: 7334.9, e: 0.04, i_deg: 141.39, planes: 3, phasing: 1, per_plane: 1 };
    let c = expand(&chrom).unwrap();
    let grid = region_grid(eastern_box(), toy_points(20), 22.2);
    let cfg = EvalConfig::default();
    let r = evaluate(&c, &grid, &EarthModel::default(), &cfg).unwrap();
    let b = brute_force(&c.sats, &grid, &cfg);
    assert!(b.c > 0.0 && b.p > 0, "toy case must exercise coverage");
    assert_eq!(r.c_mean, b.c);
    assert_eq!(r.p_cov, b.p);
    assert_eq!(r.r_mean_s, b.r);
    assert_eq!(r.point_hits, b.hits);
    assert_eq!(r.column_counts, b.columns);
    let total: u32 = r.column_counts.iter().sum();
    assert_eq!(r.c_mean, total as f64 / r.steps as f64);
    let w = FitnessWeights::default();
    let want = 1.0 / b.c + w.revisit * b.r / 60.0 + 1.0 / b.p as f64 + 3.0;
    assert!((r.fitness - want).abs() < 1e-12);
}

#[test]
fn periodic_visibility_gap() {
    // visible for 7 steps out of every 45
    let dt = 60.0;
    let row: Vec<bool> = (0..1441).map(|j| j % 45 < 7).collect();
    let r = mean_transit_gap(&row, dt);
    let period = 45.0 * dt;
    let duration = 7.0 * dt;
    assert!((r - (period - duration)).abs() <= dt);
}

#[test]
fn transit_gap_edges() {
    assert_eq!(mean_transit_gap(&[], 60.0), 0.0);
    assert_eq!(mean_transit_gap(&[false, false], 60.0), 0.0);
    assert_eq!(mean_transit_gap(&[true; 5], 60.0), 0.0);
    // leading and trailing runs excluded
    assert_eq!(mean_transit_gap(&[false, true, false, false, true, false], 60.0), 120.0);
    assert_eq!(mean_transit_gap(&[true, false, true, false, false, false, true], 10.0), 20.0);
}

#[test]
fn mean_gap_is_not_monotone_under_added_visibility() {
    // Filling a one-step gap removes it from the mean, so the mean of the
    // remaining (longer) gaps goes up.
    let before = [true, false, true, false, false, false, false, true];
    let after = [true, true, true, false, false, false, false, true];
    assert!(mean_transit_gap(&after, 1.0) > mean_transit_gap(&before, 1.0));
}

#[test]
fn hourly_bins() {
    let r = CoverageReport {
        c_mean: 0.0,
        p_cov: 0,
        p_cov_fraction: 0.0,
        r_mean_s: 0.0,
        r_mean_min: 0.0,
        n_sats: 0,
        fitness: 0.0,
        swath_km: 0.0,
        swath_ok: true,
        status: CoverageStatus::Feasible,
        dt_s: 1800.0,
        steps: 5,
        grid_points: 0,
        column_counts: vec![1, 3, 5, 7, 9],
        point_hits: vec![],
    };
    assert_eq!(r.hourly_mean_visible(), vec![2.0, 6.0, 9.0]);
}

#[test]
fn evaluator_rejects_bad_settings() {
    let grid = region_grid(eastern_box(), toy_points(3), 22.2);
    let bad_dt = EvalConfig { dt_s: 0.0, ..EvalConfig::default() };
    assert!(matches!(
        CoverageEvaluator::new(grid.clone(), EarthModel::default(), bad_dt),
        Err(CoverageError::InvalidTimeStep)
    ));
    let ev = CoverageEvaluator::new(grid, EarthModel::default(), EvalConfig::default()).unwrap();
    let empty = Constellation { sats: vec![], source: WalkerChromosome::REFERENCE };
    assert_eq!(ev.evaluate(&empty), Err(CoverageError::EmptyConstellation));
}

fn arb_sat() -> impl Strategy<Value = OrbitalElements> {
    (6571.0..7371.0f64, 0.0..0.05f64, 0.0..180.0f64, 0.0..360.0f64, 0.0..360.0f64, 0.0..360.0f64)
        .prop_map(|(a, e, i, o, w, m)| OrbitalElements::new(a, e, i, o, w, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn brute_force_equivalence(
        sats in prop::collection::vec(arb_sat(), 1..=5),
        npts in 1usize..=50,
        dt in prop::sample::select(vec![60.0, 120.0, 300.0]),
    ) {
        let grid = region_grid(eastern_box(), toy_points(npts), 22.2);
        let cfg = EvalConfig { dt_s: dt, day_length_s: 6.0 * 3600.0, ..EvalConfig::default() };
        let c = Constellation { sats: sats.clone(), source: WalkerChromosome::REFERENCE };
        let r = evaluate(&c, &grid, &EarthModel::default(), &cfg).unwrap();
        let b = brute_force(&sats, &grid, &cfg);
        prop_assert_eq!(r.c_mean, b.c);
        prop_assert_eq!(r.p_cov, b.p);
        prop_assert_eq!(r.r_mean_s, b.r);
        prop_assert_eq!(r.point_hits, b.hits);
    }

    #[test]
    fn adding_a_satellite_never_reduces_coverage(
        sats in prop::collection::vec(arb_sat(), 1..=4),
        extra in arb_sat(),
    ) {
        let grid = region_grid(eastern_box(), toy_points(30), 22.2);
        let cfg = EvalConfig { dt_s: 120.0, day_length_s: 12.0 * 3600.0, ..EvalConfig::default() };
        let ev = CoverageEvaluator::new(grid, EarthModel::default(), cfg).unwrap();
        let base = Constellation { sats: sats.clone(), source: WalkerChromosome::REFERENCE };
        let mut more = base.clone();
        more.sats.push(extra);
        let a = ev.evaluate(&base).unwrap();
        let b = ev.evaluate(&more).unwrap();
        prop_assert!(b.c_mean >= a.c_mean);
        prop_assert!(b.p_cov >= a.p_cov);
    }

    #[test]
    fn accumulation_order_is_irrelevant(sats in prop::collection::vec(arb_sat(), 2..=5)) {
        let grid = region_grid(eastern_box(), toy_points(25), 22.2);
        let cfg = EvalConfig { dt_s: 300.0, ..EvalConfig::default() };
        let ev = CoverageEvaluator::new(grid, EarthModel::default(), cfg).unwrap();
        let traces: Vec<_> = sats.iter().map(|s| ev.trace(s).unwrap()).collect();
        let mut fwd = ev.accumulator();
        traces.iter().for_each(|t| fwd.add(t));
        let mut left = ev.accumulator();
        let mut right = ev.accumulator();
        for (k, t) in traces.iter().enumerate().rev() {
            if k % 2 == 0 { left.add(t) } else { right.add(t) }
        }
        right.merge(&left);
        prop_assert_eq!(fwd.finish(&ev), right.finish(&ev));
    }

    #[test]
    fn winding_matches_ray_casting(lat in -50.0..0.0f64, lon in 105.0..165.0f64) {
        let ring = GeoPolygon::new(vec![
            LatLon::new(-12.0, 130.0), LatLon::new(-15.0, 145.0), LatLon::new(-28.0, 153.0),
            LatLon::new(-38.0, 146.0), LatLon::new(-32.0, 135.0), LatLon::new(-35.0, 117.0),
            LatLon::new(-22.0, 114.0), LatLon::new(-25.0, 125.0),
        ]);
        let p = LatLon::new(lat, lon);
        prop_assert_eq!(ring.contains(p), ray_cast(&ring.ring, p));
    }
}
