//! Two-body Keplerian propagation and frame conversions
//! (perifocal -> ECI -> ECEF -> geodetic).
//!
//! Angles cross the public API in degrees; everything inside runs in radians.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{atan2, cos, deg, fabs, hypot3, rad, sin, sqrt, wrap_180, wrap_360, TAU};

/// Iteration cap for the Newton-Raphson Kepler solver.
pub const KEPLER_MAX_ITER: usize = 50;
/// Default residual tolerance for the Kepler solver, radians.
pub const KEPLER_TOL: f64 = 1e-12;
/// Stop criterion for the iterative geodetic latitude, radians.
const LATITUDE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KeplerError {
    #[error("kepler solver did not reach tolerance {tol:e} within {iterations} iterations (residual {residual:e})")]
    IterationLimitExceeded { iterations: usize, residual: f64, tol: f64 },
    #[error("invalid orbital elements: {0}")]
    InvalidElements(&'static str),
}

/// Gravity and rotation constants of the central body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EarthModel {
    /// Gravitational parameter, km^3/s^2.
    pub mu: f64,
    /// Mean radius, km.
    pub r_e: f64,
    /// Sidereal rotation rate, rad/s.
    pub omega_e: f64,
    /// Ellipsoid eccentricity; 0 is a sphere.
    pub e_earth: f64,
}

impl Default for EarthModel {
    fn default() -> Self {
        Self { mu: 398_600.4418, r_e: 6371.0, omega_e: 7.292e-5, e_earth: 0.0 }
    }
}

impl EarthModel {
    pub fn validate(&self) -> Result<(), KeplerError> {
        if !(self.mu > 0.0 && self.r_e > 0.0 && self.omega_e > 0.0) {
            return Err(KeplerError::InvalidElements("earth model constants must be positive"));
        }
        if !(0.0..1.0).contains(&self.e_earth) {
            return Err(KeplerError::InvalidElements("earth eccentricity must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Orbital period for semi-major axis `a_km`, seconds.
    pub fn period(&self, a_km: f64) -> f64 {
        TAU * sqrt(a_km * a_km * a_km / self.mu)
    }

    /// Mean motion for semi-major axis `a_km`, rad/s.
    pub fn mean_motion(&self, a_km: f64) -> f64 {
        sqrt(self.mu / (a_km * a_km * a_km))
    }
}

/// Classical Keplerian elements of one satellite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    pub a_km: f64,
    pub e: f64,
    pub i_deg: f64,
    pub raan_deg: f64,
    pub argp_deg: f64,
    /// Mean anomaly at t = 0.
    pub ma0_deg: f64,
}

impl OrbitalElements {
    /// Builds an element set, normalising all angles into `[0, 360)`.
    pub fn new(a_km: f64, e: f64, i_deg: f64, raan_deg: f64, argp_deg: f64, ma0_deg: f64) -> Result<Self, KeplerError> {
        if !(a_km > 0.0) || !a_km.is_finite() {
            return Err(KeplerError::InvalidElements("semi-major axis must be positive"));
        }
        if !(0.0..1.0).contains(&e) {
            return Err(KeplerError::InvalidElements("eccentricity must lie in [0, 1)"));
        }
        if ![i_deg, raan_deg, argp_deg, ma0_deg].iter().all(|v| v.is_finite()) {
            return Err(KeplerError::InvalidElements("angles must be finite"));
        }
        Ok(Self {
            a_km,
            e,
            i_deg: wrap_360(i_deg),
            raan_deg: wrap_360(raan_deg),
            argp_deg: wrap_360(argp_deg),
            ma0_deg: wrap_360(ma0_deg),
        })
    }

    pub fn perigee_km(&self) -> f64 {
        self.a_km * (1.0 - self.e)
    }

    pub fn apogee_km(&self) -> f64 {
        self.a_km * (1.0 + self.e)
    }

    /// Rejects element sets whose perigee lies inside the Earth.
    pub fn check_above_surface(&self, earth: &EarthModel) -> Result<(), KeplerError> {
        if self.perigee_km() <= earth.r_e {
            Err(KeplerError::InvalidElements("perigee radius must exceed the Earth radius"))
        } else {
            Ok(())
        }
    }
}

/// Position in the Earth-centred inertial frame, km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EciState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Seconds since epoch.
    pub t: f64,
}

/// Position in the Earth-centred Earth-fixed frame, km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcefState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl EciState {
    pub fn norm(&self) -> f64 {
        hypot3(self.x, self.y, self.z)
    }

    pub fn distance_to(&self, other: &EciState) -> f64 {
        hypot3(self.x - other.x, self.y - other.y, self.z - other.z)
    }
}

impl EcefState {
    pub fn norm(&self) -> f64 {
        hypot3(self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodeticPoint {
    /// Degrees, `[-90, 90]`.
    pub lat: f64,
    /// Degrees, `(-180, 180]`.
    pub lon: f64,
    pub t: f64,
}

/// Mean anomaly at time `t` (seconds after epoch), degrees in `[0, 360)`.
pub fn mean_anomaly_at(el: &OrbitalElements, earth: &EarthModel, t: f64) -> f64 {
    let ma = rad(el.ma0_deg) + earth.mean_motion(el.a_km) * t;
    wrap_360(deg(ma))
}

/// Solves `E - e sin E = M` for the eccentric anomaly. Both angles in radians.
pub fn solve_kepler(ma: f64, e: f64, tol: f64) -> Result<f64, KeplerError> {
    let mut ecc = ma;
    let mut residual = ecc - e * sin(ecc) - ma;
    for _ in 0..KEPLER_MAX_ITER {
        if fabs(residual) < tol {
            return Ok(ecc);
        }
        ecc -= residual / (1.0 - e * cos(ecc));
        residual = ecc - e * sin(ecc) - ma;
    }
    if fabs(residual) < tol {
        Ok(ecc)
    } else {
        Err(KeplerError::IterationLimitExceeded { iterations: KEPLER_MAX_ITER, residual, tol })
    }
}

/// True anomaly from eccentric anomaly (radians), on the same branch as `ecc_anomaly`.
pub fn true_anomaly(ecc_anomaly: f64, e: f64) -> f64 {
    let half = ecc_anomaly / 2.0;
    // 2·atan(k·tan(E/2)) written with atan2 so the result stays continuous through E = π
    let f = 2.0 * atan2(sqrt(1.0 + e) * sin(half), sqrt(1.0 - e) * cos(half));
    // keep f within the same 2π turn as E
    f + TAU * libm::round((ecc_anomaly - f) / TAU)
}

/// Radial distance at true anomaly `f` (radians), km.
pub fn radius(el: &OrbitalElements, f: f64) -> f64 {
    el.a_km * (1.0 - el.e * el.e) / (1.0 + el.e * cos(f))
}

/// Perifocal-to-ECI rotation matrix for (ω, Ω, i) in radians.
pub fn perifocal_to_eci(argp: f64, raan: f64, inc: f64) -> [[f64; 3]; 3] {
    let (sw, cw) = (sin(argp), cos(argp));
    let (so, co) = (sin(raan), cos(raan));
    let (si, ci) = (sin(inc), cos(inc));
    [
        [cw * co - so * sw * ci, -co * sw - so * cw * ci, so * si],
        [so * cw + co * sw * ci, -sw * so + co * cw * ci, -co * si],
        [sw * si, cw * si, ci],
    ]
}

/// Propagates `el` to time `t` and returns the ECI position.
pub fn eci_position(el: &OrbitalElements, earth: &EarthModel, t: f64) -> Result<EciState, KeplerError> {
    let ma = rad(mean_anomaly_at(el, earth, t));
    let ecc = solve_kepler(ma, el.e, KEPLER_TOL)?;
    let f = true_anomaly(ecc, el.e);
    let r = radius(el, f);
    let (px, py) = (r * cos(f), r * sin(f));
    let m = perifocal_to_eci(rad(el.argp_deg), rad(el.raan_deg), rad(el.i_deg));
    Ok(EciState { x: m[0][0] * px + m[0][1] * py, y: m[1][0] * px + m[1][1] * py, z: m[2][0] * px + m[2][1] * py, t })
}

/// Rotates an inertial position into the Earth-fixed frame at its own epoch offset.
pub fn eci_to_ecef(s: &EciState, earth: &EarthModel) -> EcefState {
    let theta = earth.omega_e * s.t;
    let (st, ct) = (sin(theta), cos(theta));
    EcefState { x: ct * s.x + st * s.y, y: -st * s.x + ct * s.y, z: s.z, t: s.t }
}

/// Inverse of [`eci_to_ecef`].
pub fn ecef_to_eci(p: &EcefState, earth: &EarthModel) -> EciState {
    let theta = earth.omega_e * p.t;
    let (st, ct) = (sin(theta), cos(theta));
    EciState { x: ct * p.x - st * p.y, y: st * p.x + ct * p.y, z: p.z, t: p.t }
}

/// Latitude/longitude of an Earth-fixed position.
///
/// With `e_earth == 0` latitude is geocentric. Otherwise it is refined
/// iteratively from the surface-point closed form until successive values
/// differ by less than 1e-10 rad.
pub fn ecef_to_geodetic(p: &EcefState, earth: &EarthModel) -> GeodeticPoint {
    let lon = deg(atan2(p.y, p.x));
    let rho = sqrt(p.x * p.x + p.y * p.y);
    let lat = if earth.e_earth == 0.0 {
        atan2(p.z, rho)
    } else {
        let e2 = earth.e_earth * earth.e_earth;
        let mut lat = atan2(p.z, rho * (1.0 - e2));
        for _ in 0..100 {
            let s = sin(lat);
            let n = earth.r_e / sqrt(1.0 - e2 * s * s);
            let next = atan2(p.z + e2 * n * s, rho);
            let done = fabs(next - lat) < LATITUDE_TOL;
            lat = next;
            if done {
                break;
            }
        }
        lat
    };
    GeodeticPoint { lat: deg(lat), lon: wrap_180(lon), t: p.t }
}

/// Earth-fixed position of a point at geodetic `lat`/`lon` (degrees) and height `h_km`.
pub fn geodetic_to_ecef(lat: f64, lon: f64, h_km: f64, t: f64, earth: &EarthModel) -> EcefState {
    let (phi, lam) = (rad(lat), rad(lon));
    let e2 = earth.e_earth * earth.e_earth;
    let s = sin(phi);
    let n = earth.r_e / sqrt(1.0 - e2 * s * s);
    EcefState {
        x: (n + h_km) * cos(phi) * cos(lam),
        y: (n + h_km) * cos(phi) * sin(lam),
        z: (n * (1.0 - e2) + h_km) * s,
        t,
    }
}

/// Sub-satellite point of `el` at time `t`.
pub fn subsatellite_point(el: &OrbitalElements, earth: &EarthModel, t: f64) -> Result<GeodeticPoint, KeplerError> {
    let eci = eci_position(el, earth, t)?;
    Ok(ecef_to_geodetic(&eci_to_ecef(&eci, earth), earth))
}

/// Samples the ground track every `dt` seconds over `[0, duration]`.
pub fn ground_track(
    el: &OrbitalElements,
    earth: &EarthModel,
    dt: f64,
    duration: f64,
) -> Result<alloc::vec::Vec<GeodeticPoint>, KeplerError> {
    let steps = crate::math::floor(duration / dt) as usize + 1;
    (0..steps).map(|j| subsatellite_point(el, earth, j as f64 * dt)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn earth() -> EarthModel {
        EarthModel::default()
    }

    fn circular(a: f64, i: f64) -> OrbitalElements {
        OrbitalElements::new(a, 0.0, i, 0.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn mean_anomaly_zero_time() {
        let el = circular(7334.9, 0.0);
        assert_eq!(mean_anomaly_at(&el, &earth(), 0.0), 0.0);
    }

    #[test]
    fn mean_anomaly_full_period_wraps() {
        let el = circular(7334.9, 0.0);
        let t = earth().period(7334.9);
        let m = mean_anomaly_at(&el, &earth(), t);
        assert!(m < 1e-9 || 360.0 - m < 1e-9, "{m}");
    }

    #[test]
    fn mean_anomaly_after_one_minute() {
        // sqrt(mu/a^3)*60*180/pi evaluated independently
        let el = circular(7334.9, 0.0);
        let m = mean_anomaly_at(&el, &earth(), 60.0);
        assert!((m - 3.455027231673034).abs() < 1e-12, "{m}");
    }

    #[test]
    fn kepler_fixed_points() {
        assert_eq!(solve_kepler(0.0, 0.04, 1e-12).unwrap(), 0.0);
        for x in [0.0, 0.3, 1.7, 3.0, 5.9] {
            assert_eq!(solve_kepler(x, 0.0, 1e-12).unwrap(), x);
        }
    }

    #[test]
    fn kepler_matches_bisection() {
        // bisection on g(E) = E - 0.05 sin E - 1 over [0, 2π]
        let (mut lo, mut hi) = (0.0_f64, 2.0 * PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid - 0.05 * mid.sin() - 1.0 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let e = solve_kepler(1.0, 0.05, 1e-14).unwrap();
        assert!((e - lo).abs() < 1e-13);
        assert!((e - 1.0432010111431815).abs() < 1e-13);
    }

    #[test]
    fn kepler_reports_iteration_limit() {
        let err = solve_kepler(1.0, 0.05, 0.0).unwrap_err();
        assert!(matches!(err, KeplerError::IterationLimitExceeded { iterations: 50, .. }));
    }

    #[test]
    fn true_anomaly_cases() {
        assert_eq!(true_anomaly(0.0, 0.04), 0.0);
        assert!((true_anomaly(PI, 0.04) - PI).abs() < 1e-12);
        // 2·atan(sqrt(1.05/0.95)·tan(0.6)) evaluated independently
        assert!((true_anomaly(1.2, 0.05) - 1.2470489956773958).abs() < 1e-13);
        // continuity across E = π and beyond a full turn
        let f = true_anomaly(PI + 0.01, 0.04);
        assert!(f > PI && f < PI + 0.02);
        assert!((true_anomaly(TAU + 0.5, 0.0) - (TAU + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn radius_cases() {
        let c = circular(7334.9, 0.0);
        assert!((radius(&c, 1.234) - 7334.9).abs() < 1e-9);
        let el = OrbitalElements::new(7334.9, 0.04, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!((radius(&el, 0.0) - 7041.504).abs() < 1e-9);
        assert!((radius(&el, PI / 2.0) - 7323.16416).abs() < 1e-8);
    }

    #[test]
    fn eci_identity_rotation() {
        let el = circular(7000.0, 0.0);
        let s = eci_position(&el, &earth(), 0.0).unwrap();
        assert!((s.x - 7000.0).abs() < 1e-9 && s.y.abs() < 1e-9 && s.z.abs() < 1e-9);
    }

    #[test]
    fn eci_polar_quarter_orbit() {
        let el = circular(7000.0, 90.0);
        let t = earth().period(7000.0) / 4.0;
        let s = eci_position(&el, &earth(), t).unwrap();
        assert!(s.x.abs() < 1e-6 && s.y.abs() < 1e-6 && (s.z - 7000.0).abs() < 1e-6, "{s:?}");
    }

    #[test]
    fn eci_reference_satellite_at_300s() {
        // Independent numpy propagator (R3(Ω)·R1(i)·R3(ω) composition): a=7334.9, e=0.04, i=141.39, Ω=ω=MA0=0
        let el = OrbitalElements::new(7334.9, 0.04, 141.39, 0.0, 0.0, 0.0).unwrap();
        let s = eci_position(&el, &earth(), 300.0).unwrap();
        let want = [6683.192804384764, -1768.0914409699021, 1411.954168604239];
        for (got, want) in [s.x, s.y, s.z].iter().zip(want) {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn ecef_rotation_cases() {
        let e = earth();
        let s = EciState { x: 1.0, y: 2.0, z: 3.0, t: 0.0 };
        let p = eci_to_ecef(&s, &e);
        assert_eq!((p.x, p.y, p.z), (1.0, 2.0, 3.0));

        let day = TAU / e.omega_e;
        let p = eci_to_ecef(&EciState { x: 6371.0, y: 0.0, z: 0.0, t: day }, &e);
        assert!((p.x - 6371.0).abs() < 1e-9 && p.y.abs() < 1e-9);

        let p = eci_to_ecef(&EciState { x: 7000.0, y: 0.0, z: 0.0, t: 3600.0 }, &e);
        let th = e.omega_e * 3600.0;
        assert!((p.x - 7000.0 * th.cos()).abs() < 1e-9);
        assert!((p.y + 7000.0 * th.sin()).abs() < 1e-9);
    }

    #[test]
    fn geodetic_cases() {
        let e = earth();
        let g = ecef_to_geodetic(&EcefState { x: 6371.0, y: 0.0, z: 0.0, t: 0.0 }, &e);
        assert_eq!((g.lat, g.lon), (0.0, 0.0));
        let g = ecef_to_geodetic(&EcefState { x: 0.0, y: 0.0, z: 6371.0, t: 0.0 }, &e);
        assert_eq!(g.lat, 90.0);
        let g = ecef_to_geodetic(&EcefState { x: 4000.0, y: 4000.0, z: 3000.0, t: 0.0 }, &e);
        assert!((g.lat - 27.93835272960235).abs() < 1e-12);
        assert!((g.lon - 45.0).abs() < 1e-12);
    }

    #[test]
    fn ellipsoidal_round_trip() {
        // WGS-84-like ellipsoid to exercise the iterative branch
        let e = EarthModel { r_e: 6378.137, e_earth: 0.0818191908426, ..EarthModel::default() };
        for (lat, lon) in [(-33.9, 151.2), (0.0, 10.0), (60.0, -120.0), (-80.0, 179.0)] {
            let p = geodetic_to_ecef(lat, lon, 0.0, 0.0, &e);
            let g = ecef_to_geodetic(&p, &e);
            assert!((g.lat - lat).abs() < 1e-8, "{lat} -> {}", g.lat);
            assert!((g.lon - lon).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_elements() {
        assert!(OrbitalElements::new(-1.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(OrbitalElements::new(7000.0, 1.0, 0.0, 0.0, 0.0, 0.0).is_err());
        let low = OrbitalElements::new(6500.0, 0.05, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(low.check_above_surface(&earth()).is_err());
        let el = OrbitalElements::new(7000.0, 0.0, -10.0, 370.0, 720.0, -0.0).unwrap();
        assert_eq!((el.i_deg, el.raan_deg, el.argp_deg), (350.0, 10.0, 0.0));
    }
}
