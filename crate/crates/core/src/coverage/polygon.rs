//! Lat/lon polygons treated as planar rings in degree space.
//!
//! Adequate for regions that neither enclose a pole nor straddle the
//! antimeridian, which covers every bundled region.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math::fabs;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub const fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }
}

/// A simple closed ring; the closing edge back to the first vertex is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoPolygon {
    pub ring: Vec<LatLon>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl BoundingBox {
    pub fn contains(&self, p: LatLon) -> bool {
        p.lat >= self.lat_min && p.lat <= self.lat_max && p.lon >= self.lon_min && p.lon <= self.lon_max
    }
}

impl GeoPolygon {
    pub fn new(ring: Vec<LatLon>) -> Self {
        let mut ring = ring;
        if ring.len() > 1 && ring.first() == ring.last() {
            ring.pop();
        }
        Self { ring }
    }

    /// Axis-aligned rectangle spanning the given corners.
    pub fn rectangle(lat_min: f64, lat_max: f64, lon_min: f64, lon_max: f64) -> Self {
        Self::new(alloc::vec![
            LatLon::new(lat_min, lon_min),
            LatLon::new(lat_min, lon_max),
            LatLon::new(lat_max, lon_max),
            LatLon::new(lat_max, lon_min),
        ])
    }

    /// Signed shoelace area in square degrees.
    pub fn signed_area(&self) -> f64 {
        let n = self.ring.len();
        if n < 3 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..n {
            let (a, b) = (self.ring[i], self.ring[(i + 1) % n]);
            acc += a.lon * b.lat - b.lon * a.lat;
        }
        acc / 2.0
    }

    pub fn bbox(&self) -> BoundingBox {
        let mut b = BoundingBox {
            lat_min: f64::INFINITY,
            lat_max: f64::NEG_INFINITY,
            lon_min: f64::INFINITY,
            lon_max: f64::NEG_INFINITY,
        };
        for p in &self.ring {
            b.lat_min = b.lat_min.min(p.lat);
            b.lat_max = b.lat_max.max(p.lat);
            b.lon_min = b.lon_min.min(p.lon);
            b.lon_max = b.lon_max.max(p.lon);
        }
        b
    }

    /// Point-in-polygon by winding number; points on an edge count as inside.
    pub fn contains(&self, p: LatLon) -> bool {
        let n = self.ring.len();
        if n < 3 {
            return false;
        }
        let mut winding = 0i32;
        for i in 0..n {
            let (a, b) = (self.ring[i], self.ring[(i + 1) % n]);
            let cross = (b.lon - a.lon) * (p.lat - a.lat) - (p.lon - a.lon) * (b.lat - a.lat);
            if on_segment(a, b, p, cross) {
                return true;
            }
            if a.lat <= p.lat {
                if b.lat > p.lat && cross > 0.0 {
                    winding += 1;
                }
            } else if b.lat <= p.lat && cross < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }
}

fn on_segment(a: LatLon, b: LatLon, p: LatLon, cross: f64) -> bool {
    let scale = fabs(b.lon - a.lon) + fabs(b.lat - a.lat);
    fabs(cross) <= 1e-12 * scale.max(1.0)
        && p.lon >= a.lon.min(b.lon)
        && p.lon <= a.lon.max(b.lon)
        && p.lat >= a.lat.min(b.lat)
        && p.lat <= a.lat.max(b.lat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_membership() {
        let sq = GeoPolygon::rectangle(0.0, 10.0, 0.0, 10.0);
        assert!(sq.contains(LatLon::new(5.0, 5.0)));
        assert!(sq.contains(LatLon::new(0.0, 5.0)));
        assert!(sq.contains(LatLon::new(10.0, 10.0)));
        assert!(!sq.contains(LatLon::new(10.1, 5.0)));
        assert!(!sq.contains(LatLon::new(-5.0, -5.0)));
        assert_eq!(sq.signed_area(), 100.0);
    }

    #[test]
    fn concave_ring() {
        // a "U" opening northward
        let u = GeoPolygon::new(alloc::vec![
            LatLon::new(0.0, 0.0),
            LatLon::new(0.0, 3.0),
            LatLon::new(3.0, 3.0),
            LatLon::new(3.0, 2.0),
            LatLon::new(1.0, 2.0),
            LatLon::new(1.0, 1.0),
            LatLon::new(3.0, 1.0),
            LatLon::new(3.0, 0.0),
            LatLon::new(0.0, 0.0),
        ]);
        assert_eq!(u.ring.len(), 8);
        assert!(u.contains(LatLon::new(0.5, 1.5)));
        assert!(!u.contains(LatLon::new(2.0, 1.5)));
        assert!(u.contains(LatLon::new(2.0, 0.5)));
        assert!(u.contains(LatLon::new(2.0, 2.5)));
    }
}
