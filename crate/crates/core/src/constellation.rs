//! Walker-delta chromosome and its expansion into per-satellite elements.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kepler::{EarthModel, KeplerError, OrbitalElements};
use crate::math::wrap_360;

/// The six design genes of a constellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkerChromosome {
    pub a_km: f64,
    pub e: f64,
    pub i_deg: f64,
    pub planes: u32,
    pub phasing: u32,
    pub per_plane: u32,
}

impl WalkerChromosome {
    /// The accepted solution reported for the Australian coverage problem.
    pub const REFERENCE: WalkerChromosome =
        WalkerChromosome { a_km: 7334.9, e: 0.04, i_deg: 141.39, planes: 95, phasing: 9, per_plane: 42 };

    pub fn total(&self) -> u32 {
        self.planes * self.per_plane
    }

    /// Altitude of the semi-major axis above a spherical Earth, km.
    pub fn altitude_km(&self, earth: &EarthModel) -> f64 {
        self.a_km - earth.r_e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gene {
    SemiMajorAxis,
    Eccentricity,
    Inclination,
    Planes,
    Phasing,
    PerPlane,
    Total,
}

impl fmt::Display for Gene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gene::SemiMajorAxis => "a_km",
            Gene::Eccentricity => "e",
            Gene::Inclination => "i_deg",
            Gene::Planes => "planes",
            Gene::Phasing => "phasing",
            Gene::PerPlane => "per_plane",
            Gene::Total => "total",
        })
    }
}

/// A gene outside its admissible interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub gene: Gene,
    pub value: f64,
    pub min: f64,
    pub max: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value > self.max {
            write!(f, "{} = {} exceeds {}", self.gene, self.value, self.max)
        } else {
            write!(f, "{} = {} is below {}", self.gene, self.value, self.min)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstellationError {
    #[error("gene bound violated: {0}")]
    BoundViolation(Violation),
    #[error(transparent)]
    Elements(#[from] KeplerError),
}

/// Admissible gene ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneBounds {
    pub a_km: (f64, f64),
    pub e: (f64, f64),
    pub i_deg: (f64, f64),
    pub planes: (u32, u32),
    pub phasing: (u32, u32),
    pub per_plane: (u32, u32),
    /// Cap on `planes * per_plane`.
    pub max_total: u32,
    /// Lets `phasing` go up to `planes` instead of the nominal upper bound.
    #[serde(default)]
    pub phasing_up_to_planes: bool,
}

impl Default for GeneBounds {
    /// 200-1000 km altitude over a 6371 km Earth; at most 5000 satellites.
    fn default() -> Self {
        Self {
            a_km: (6571.0, 7371.0),
            e: (0.0, 0.05),
            i_deg: (0.0, 180.0),
            planes: (1, 100),
            phasing: (1, 8),
            per_plane: (1, 50),
            max_total: 5000,
            phasing_up_to_planes: false,
        }
    }
}

impl GeneBounds {
    /// Default bounds with the phasing override switched on.
    pub fn permissive_phasing() -> Self {
        Self { phasing_up_to_planes: true, ..Self::default() }
    }

    /// Upper phasing bound for a given plane count.
    pub fn phasing_max(&self, planes: u32) -> u32 {
        if self.phasing_up_to_planes {
            self.phasing.1.max(planes)
        } else {
            self.phasing.1
        }
    }

    pub fn validate(&self, c: &WalkerChromosome) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut check = |gene, value: f64, (min, max): (f64, f64)| {
            if !(value >= min && value <= max) {
                out.push(Violation { gene, value, min, max });
            }
        };
        let int = |(lo, hi): (u32, u32)| (lo as f64, hi as f64);
        check(Gene::SemiMajorAxis, c.a_km, self.a_km);
        check(Gene::Eccentricity, c.e, self.e);
        check(Gene::Inclination, c.i_deg, self.i_deg);
        check(Gene::Planes, c.planes as f64, int(self.planes));
        check(Gene::Phasing, c.phasing as f64, int((self.phasing.0, self.phasing_max(c.planes))));
        check(Gene::PerPlane, c.per_plane as f64, int(self.per_plane));
        check(Gene::Total, c.total() as f64, (1.0, self.max_total as f64));
        out
    }
}

/// Violations of `c` against the default bounds; empty when admissible.
pub fn validate(c: &WalkerChromosome) -> Vec<Violation> {
    GeneBounds::default().validate(c)
}

/// An expanded constellation: `planes * per_plane` satellites, plane-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    pub sats: Vec<OrbitalElements>,
    pub source: WalkerChromosome,
}

impl Constellation {
    pub fn len(&self) -> usize {
        self.sats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sats.is_empty()
    }

    /// Every `step`-th satellite, keeping the source chromosome for reference.
    pub fn subsample(&self, step: usize) -> Constellation {
        let step = step.max(1);
        Constellation { sats: self.sats.iter().step_by(step).copied().collect(), source: self.source }
    }
}

/// Expands `c` against the default bounds.
pub fn expand(c: &WalkerChromosome) -> Result<Constellation, ConstellationError> {
    expand_with(c, &GeneBounds::default())
}

/// Expands `c` into satellites.
///
/// Plane `p` gets RAAN `p·360/P`; slot `k` within a plane gets argument of
/// perigee `k·360/n`; the mean anomaly at epoch carries the inter-plane
/// phasing `p·360·F/N`. The in-plane slot offset lives in ω only, so the
/// argument of latitude at epoch is the Walker-delta `k·360/n + p·360·F/N`.
pub fn expand_with(c: &WalkerChromosome, bounds: &GeneBounds) -> Result<Constellation, ConstellationError> {
    if let Some(v) = bounds.validate(c).into_iter().next() {
        return Err(ConstellationError::BoundViolation(v));
    }
    let (planes, per_plane) = (c.planes as usize, c.per_plane as usize);
    let total = c.total() as f64;
    let mut sats = Vec::with_capacity(planes * per_plane);
    for p in 0..planes {
        let raan = p as f64 * 360.0 / c.planes as f64;
        let phase = wrap_360(p as f64 * 360.0 * c.phasing as f64 / total);
        for k in 0..per_plane {
            let argp = k as f64 * 360.0 / c.per_plane as f64;
            sats.push(OrbitalElements::new(c.a_km, c.e, c.i_deg, raan, argp, phase)?);
        }
    }
    Ok(Constellation { sats, source: *c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;

    fn chrom(planes: u32, phasing: u32, per_plane: u32) -> WalkerChromosome {
        WalkerChromosome { a_km: 7000.0, e: 0.01, i_deg: 50.0, planes, phasing, per_plane }
    }

    #[test]
    fn singleton() {
        let c = expand(&chrom(1, 1, 1)).unwrap();
        assert_eq!(c.len(), 1);
        let s = c.sats[0];
        assert_eq!((s.raan_deg, s.argp_deg, s.ma0_deg), (0.0, 0.0, 0.0));
    }

    #[test]
    fn two_by_two_hand_expansion() {
        let c = expand(&chrom(2, 1, 2)).unwrap();
        let got: Vec<_> = c.sats.iter().map(|s| (s.raan_deg, s.argp_deg, s.ma0_deg)).collect();
        assert_eq!(got, [(0.0, 0.0, 0.0), (0.0, 180.0, 0.0), (180.0, 0.0, 90.0), (180.0, 180.0, 90.0)]);
    }

    #[test]
    fn reference_total() {
        let c = expand_with(&WalkerChromosome::REFERENCE, &GeneBounds::permissive_phasing()).unwrap();
        assert_eq!(c.len(), 3990);
        assert!(c.sats.iter().all(|s| s.a_km == 7334.9 && s.e == 0.04 && s.i_deg == 141.39));
    }

    #[test]
    fn validate_cases() {
        let ok = WalkerChromosome { a_km: 7000.0, e: 0.01, i_deg: 50.0, planes: 10, phasing: 2, per_plane: 5 };
        assert!(validate(&ok).is_empty());

        let v = validate(&WalkerChromosome { e: 0.2, ..ok });
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].gene, Gene::Eccentricity);
        assert_eq!(alloc::format!("{}", v[0]), "e = 0.2 exceeds 0.05");

        let v = validate(&WalkerChromosome::REFERENCE);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].gene, v[0].value, v[0].max), (Gene::Phasing, 9.0, 8.0));
        assert!(GeneBounds::permissive_phasing().validate(&WalkerChromosome::REFERENCE).is_empty());
    }

    #[test]
    fn expand_names_offending_gene() {
        let err = expand(&WalkerChromosome { a_km: 6000.0, ..chrom(2, 1, 2) }).unwrap_err();
        assert!(matches!(err, ConstellationError::BoundViolation(v) if v.gene == Gene::SemiMajorAxis));
    }

    #[test]
    fn planes_are_uniform() {
        let c = expand(&chrom(7, 3, 5)).unwrap();
        let mut by_raan: BTreeMap<u64, usize> = BTreeMap::new();
        for s in &c.sats {
            *by_raan.entry((s.raan_deg * 1e6) as u64).or_default() += 1;
        }
        assert_eq!(by_raan.len(), 7);
        assert!(by_raan.values().all(|&n| n == 5));
        let raans: Vec<f64> = by_raan.keys().map(|&k| k as f64 / 1e6).collect();
        for w in raans.windows(2) {
            assert!((w[1] - w[0] - 360.0 / 7.0).abs() < 1e-5);
        }
    }
}
