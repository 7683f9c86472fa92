//! Per-pixel fire classification from thermal brightness temperatures and
//! visible/near-infrared reflectances.
//!
//! Radiances at the interface are in W·m⁻²·sr⁻¹·µm⁻¹. The pipeline is
//! water mask, cloud test, then the day or night fire test depending on the
//! solar zenith angle. Every comparison is strict.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{expm1, log1p, pow};

pub const PLANCK_H: f64 = 6.626_070_15e-34;
pub const BOLTZMANN_K: f64 = 1.380_649e-23;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// First radiation constant `2hc²`, W·m².
pub const C1: f64 = 2.0 * PLANCK_H * SPEED_OF_LIGHT * SPEED_OF_LIGHT;
/// Second radiation constant `hc/k`, m·K.
pub const C2: f64 = PLANCK_H * SPEED_OF_LIGHT / BOLTZMANN_K;

pub const LAMBDA_4: f64 = 4.0e-6;
pub const LAMBDA_11: f64 = 11.0e-6;
pub const LAMBDA_12: f64 = 12.0e-6;

/// Zenith angles below this are daytime.
pub const DAY_ZENITH_DEG: f64 = 85.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Radiance4,
    Radiance11,
    Radiance12,
    Reflectance065,
    Reflectance086,
    SolarZenith,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Radiance4 => "radiance_4um",
            Channel::Radiance11 => "radiance_11um",
            Channel::Radiance12 => "radiance_12um",
            Channel::Reflectance065 => "reflectance_065um",
            Channel::Reflectance086 => "reflectance_086um",
            Channel::SolarZenith => "solar_zenith",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FireError {
    #[error("radiance must be positive, got {0}")]
    NonPositiveRadiance(f64),
    #[error("wavelength must be positive, got {0}")]
    NonPositiveWavelength(f64),
    #[error("missing channel {0}")]
    MissingChannel(Channel),
    #[error("plane {plane} has {got} values, expected {expected}")]
    ShapeMismatch { plane: String, expected: usize, got: usize },
    #[error("infeasible pixel spec: {0}")]
    InfeasibleSpec(String),
    #[error("pixel ({row}, {col}): {source}")]
    AtPixel {
        row: usize,
        col: usize,
        #[source]
        source: Box<FireError>,
    },
}

/// Spectral radiance at temperature `t_k` and wavelength `lambda_m`, SI units
/// (W·m⁻³·sr⁻¹).
pub fn planck_si(t_k: f64, lambda_m: f64) -> f64 {
    C1 / (pow(lambda_m, 5.0) * expm1(C2 / (lambda_m * t_k)))
}

/// Spectral radiance in W·m⁻²·sr⁻¹·µm⁻¹.
pub fn planck(t_k: f64, lambda_m: f64) -> f64 {
    planck_si(t_k, lambda_m) * 1e-6
}

/// Inverse Planck: brightness temperature for radiance `l` given per micron.
pub fn brightness_temperature(l: f64, lambda_m: f64) -> Result<f64, FireError> {
    if !(l > 0.0) {
        return Err(FireError::NonPositiveRadiance(l));
    }
    if !(lambda_m > 0.0) {
        return Err(FireError::NonPositiveWavelength(lambda_m));
    }
    let l_si = l * 1e6;
    Ok(C2 / (lambda_m * log1p(C1 / (pow(lambda_m, 5.0) * l_si))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PixelClass {
    Water,
    Cloud,
    FireDay,
    FireNight,
    NonFire,
}

impl PixelClass {
    pub const ALL: [PixelClass; 5] =
        [PixelClass::Water, PixelClass::Cloud, PixelClass::FireDay, PixelClass::FireNight, PixelClass::NonFire];

    pub fn is_fire(self) -> bool {
        matches!(self, PixelClass::FireDay | PixelClass::FireNight)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PixelClass::Water => "water",
            PixelClass::Cloud => "cloud",
            PixelClass::FireDay => "fire_day",
            PixelClass::FireNight => "fire_night",
            PixelClass::NonFire => "non_fire",
        }
    }
}

impl fmt::Display for PixelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Brightness temperatures of the three thermal channels, K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Temperatures {
    pub t4: f64,
    pub t11: f64,
    pub t12: f64,
}

/// One pixel's inputs after brightness-temperature conversion. Reflectances
/// may be absent at night.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelObs {
    pub temps: Temperatures,
    pub rho065: Option<f64>,
    pub rho086: Option<f64>,
    pub zenith_deg: f64,
    pub water: bool,
}

pub fn is_day(zenith_deg: f64) -> bool {
    zenith_deg < DAY_ZENITH_DEG
}

/// Classifies a pixel whose temperatures are already known.
pub fn classify_temperatures(px: &PixelObs) -> Result<PixelClass, FireError> {
    if px.water {
        return Ok(PixelClass::Water);
    }
    let Temperatures { t4, t11, t12 } = px.temps;
    if is_day(px.zenith_deg) {
        let r65 = px.rho065.ok_or(FireError::MissingChannel(Channel::Reflectance065))?;
        let r86 = px.rho086.ok_or(FireError::MissingChannel(Channel::Reflectance086))?;
        let sum = r65 + r86;
        let cloud = sum > 1.2 || t12 < 265.0 || (sum > 0.7 && t12 < 285.0) || (r86 > 0.25 && t12 < 300.0);
        if cloud {
            return Ok(PixelClass::Cloud);
        }
        if t4 > 310.0 && t4 - t11 > 10.0 && r86 < 0.35 {
            return Ok(PixelClass::FireDay);
        }
    } else {
        if t12 < 265.0 {
            return Ok(PixelClass::Cloud);
        }
        if t4 > 305.0 && t4 - t11 > 10.0 {
            return Ok(PixelClass::FireNight);
        }
    }
    Ok(PixelClass::NonFire)
}

/// Raw channel values of one pixel. `None` marks a missing sample.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PixelRadiance {
    pub l4: Option<f64>,
    pub l11: Option<f64>,
    pub l12: Option<f64>,
    pub rho065: Option<f64>,
    pub rho086: Option<f64>,
    pub zenith_deg: Option<f64>,
    pub water: bool,
}

/// Full per-pixel pipeline from radiances.
pub fn classify_pixel(px: &PixelRadiance) -> Result<PixelClass, FireError> {
    if px.water {
        return Ok(PixelClass::Water);
    }
    let bt = |l: Option<f64>, ch: Channel, lambda: f64| {
        l.ok_or(FireError::MissingChannel(ch)).and_then(|l| brightness_temperature(l, lambda))
    };
    let temps = Temperatures {
        t4: bt(px.l4, Channel::Radiance4, LAMBDA_4)?,
        t11: bt(px.l11, Channel::Radiance11, LAMBDA_11)?,
        t12: bt(px.l12, Channel::Radiance12, LAMBDA_12)?,
    };
    let zenith_deg = px.zenith_deg.ok_or(FireError::MissingChannel(Channel::SolarZenith))?;
    classify_temperatures(&PixelObs { temps, rho065: px.rho065, rho086: px.rho086, zenith_deg, water: false })
}

/// Pixel geolocation: explicit planes or an affine transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geolocation {
    /// Per-pixel latitude and longitude planes, degrees.
    Planes { lat: Vec<f64>, lon: Vec<f64> },
    /// `[lon0, dlon_col, dlon_row, lat0, dlat_col, dlat_row]` evaluated at
    /// pixel centres.
    GeoTransform([f64; 6]),
}

/// A multi-channel image. Planes are row-major `height × width`; NaN marks a
/// missing sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneRaster {
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub l4: Vec<f64>,
    pub l11: Vec<f64>,
    pub l12: Vec<f64>,
    pub rho065: Option<Vec<f64>>,
    pub rho086: Option<Vec<f64>>,
    pub solar_zenith: Vec<f64>,
    pub water_mask: Option<Vec<bool>>,
    pub geolocation: Geolocation,
}

fn sample(plane: &[f64], i: usize) -> Option<f64> {
    plane.get(i).copied().filter(|v| !v.is_nan())
}

impl SceneRaster {
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<(), FireError> {
        let n = self.len();
        let check = |name: &str, got: usize| {
            if got == n {
                Ok(())
            } else {
                Err(FireError::ShapeMismatch { plane: name.into(), expected: n, got })
            }
        };
        check("l4", self.l4.len())?;
        check("l11", self.l11.len())?;
        check("l12", self.l12.len())?;
        check("solar_zenith", self.solar_zenith.len())?;
        if let Some(p) = &self.rho065 {
            check("rho065", p.len())?;
        }
        if let Some(p) = &self.rho086 {
            check("rho086", p.len())?;
        }
        if let Some(p) = &self.water_mask {
            check("water_mask", p.len())?;
        }
        if let Geolocation::Planes { lat, lon } = &self.geolocation {
            check("lat", lat.len())?;
            check("lon", lon.len())?;
        }
        Ok(())
    }

    pub fn pixel(&self, row: usize, col: usize) -> PixelRadiance {
        let i = row * self.width + col;
        PixelRadiance {
            l4: sample(&self.l4, i),
            l11: sample(&self.l11, i),
            l12: sample(&self.l12, i),
            rho065: self.rho065.as_deref().and_then(|p| sample(p, i)),
            rho086: self.rho086.as_deref().and_then(|p| sample(p, i)),
            zenith_deg: sample(&self.solar_zenith, i),
            water: self.water_mask.as_deref().is_some_and(|m| m[i]),
        }
    }

    /// `(lat, lon)` of a pixel, degrees.
    pub fn lat_lon(&self, row: usize, col: usize) -> (f64, f64) {
        match &self.geolocation {
            Geolocation::Planes { lat, lon } => {
                let i = row * self.width + col;
                (lat[i], lon[i])
            }
            Geolocation::GeoTransform(g) => {
                let (x, y) = (col as f64 + 0.5, row as f64 + 0.5);
                (g[3] + x * g[4] + y * g[5], g[0] + x * g[1] + y * g[2])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirePixel {
    pub row: usize,
    pub col: usize,
    pub lat: f64,
    pub lon: f64,
    pub class: PixelClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassCounts {
    pub water: usize,
    pub cloud: usize,
    pub fire_day: usize,
    pub fire_night: usize,
    pub non_fire: usize,
}

impl ClassCounts {
    pub fn add(&mut self, c: PixelClass) {
        *self.slot(c) += 1;
    }

    pub fn get(&self, c: PixelClass) -> usize {
        match c {
            PixelClass::Water => self.water,
            PixelClass::Cloud => self.cloud,
            PixelClass::FireDay => self.fire_day,
            PixelClass::FireNight => self.fire_night,
            PixelClass::NonFire => self.non_fire,
        }
    }

    pub fn merge(&mut self, o: &ClassCounts) {
        for c in PixelClass::ALL {
            *self.slot(c) += o.get(c);
        }
    }

    pub fn total(&self) -> usize {
        PixelClass::ALL.iter().map(|&c| self.get(c)).sum()
    }

    pub fn fires(&self) -> usize {
        self.fire_day + self.fire_night
    }

    fn slot(&mut self, c: PixelClass) -> &mut usize {
        match c {
            PixelClass::Water => &mut self.water,
            PixelClass::Cloud => &mut self.cloud,
            PixelClass::FireDay => &mut self.fire_day,
            PixelClass::FireNight => &mut self.fire_night,
            PixelClass::NonFire => &mut self.non_fire,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FireReport {
    pub scene_id: String,
    /// Fire pixels in row-major order.
    pub fire_pixels: Vec<FirePixel>,
    pub counts: ClassCounts,
}

/// Classification of a band of rows; bands are concatenated in row order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RowBand {
    pub fire_pixels: Vec<FirePixel>,
    pub counts: ClassCounts,
}

/// Classifies rows `rows.start..rows.end`.
pub fn classify_rows(scene: &SceneRaster, rows: core::ops::Range<usize>) -> Result<RowBand, FireError> {
    let mut band = RowBand::default();
    for row in rows {
        for col in 0..scene.width {
            let class = classify_pixel(&scene.pixel(row, col)).map_err(|e| FireError::AtPixel {
                row,
                col,
                source: Box::new(e),
            })?;
            band.counts.add(class);
            if class.is_fire() {
                let (lat, lon) = scene.lat_lon(row, col);
                band.fire_pixels.push(FirePixel { row, col, lat, lon, class });
            }
        }
    }
    Ok(band)
}

/// Joins row bands given in row order into a report.
pub fn assemble_report(scene_id: &str, bands: impl IntoIterator<Item = RowBand>) -> FireReport {
    let mut report = FireReport { scene_id: scene_id.into(), fire_pixels: Vec::new(), counts: ClassCounts::default() };
    for b in bands {
        report.fire_pixels.extend(b.fire_pixels);
        report.counts.merge(&b.counts);
    }
    report
}

pub fn classify_scene(scene: &SceneRaster) -> Result<FireReport, FireError> {
    scene.validate()?;
    let band = classify_rows(scene, 0..scene.height)?;
    Ok(assemble_report(&scene.id, [band]))
}

/// Requested physical state of one synthetic pixel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelSpec {
    pub class: PixelClass,
    pub t4: f64,
    pub t11: f64,
    pub t12: f64,
    pub rho065: f64,
    pub rho086: f64,
    pub zenith_deg: f64,
}

impl PixelSpec {
    /// A clear daytime land pixel at a uniform temperature.
    pub fn background(t_k: f64) -> Self {
        Self { class: PixelClass::NonFire, t4: t_k, t11: t_k, t12: t_k, rho065: 0.1, rho086: 0.15, zenith_deg: 40.0 }
    }

    pub fn fire_day() -> Self {
        Self { class: PixelClass::FireDay, t4: 340.0, t11: 300.0, t12: 298.0, ..Self::background(300.0) }
    }

    pub fn fire_night() -> Self {
        Self {
            class: PixelClass::FireNight,
            t4: 320.0,
            t11: 290.0,
            t12: 288.0,
            zenith_deg: 120.0,
            ..Self::background(290.0)
        }
    }

    pub fn water() -> Self {
        Self { class: PixelClass::Water, ..Self::background(290.0) }
    }

    fn obs(&self) -> PixelObs {
        PixelObs {
            temps: Temperatures { t4: self.t4, t11: self.t11, t12: self.t12 },
            rho065: Some(self.rho065),
            rho086: Some(self.rho086),
            zenith_deg: self.zenith_deg,
            water: self.class == PixelClass::Water,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub background: PixelSpec,
    /// `(row, col, pixel)` overrides; later entries win.
    pub planted: Vec<(usize, usize, PixelSpec)>,
    pub geotransform: [f64; 6],
}

/// Radiance (per µm) whose brightness temperature is `t_k`, nudged by ulps so
/// the inversion lands as close to `t_k` as f64 allows.
pub fn radiance_for(t_k: f64, lambda_m: f64) -> f64 {
    let mut l = planck(t_k, lambda_m);
    for _ in 0..64 {
        let Ok(t) = brightness_temperature(l, lambda_m) else { break };
        if t < t_k {
            l = l.next_up();
        } else if t > t_k {
            l = l.next_down();
        } else {
            break;
        }
    }
    l
}

/// Builds a scene whose classification reproduces every pixel's class.
pub fn generate_synthetic_scene(spec: &SceneSpec) -> Result<SceneRaster, FireError> {
    let n = spec.width * spec.height;
    let mut pixels = alloc::vec![spec.background; n];
    for &(r, c, p) in &spec.planted {
        if r >= spec.height || c >= spec.width {
            return Err(FireError::InfeasibleSpec(alloc::format!("pixel ({r}, {c}) lies outside the scene")));
        }
        pixels[r * spec.width + c] = p;
    }
    let mut scene = SceneRaster {
        id: spec.id.clone(),
        width: spec.width,
        height: spec.height,
        l4: Vec::with_capacity(n),
        l11: Vec::with_capacity(n),
        l12: Vec::with_capacity(n),
        rho065: Some(Vec::with_capacity(n)),
        rho086: Some(Vec::with_capacity(n)),
        solar_zenith: Vec::with_capacity(n),
        water_mask: Some(Vec::with_capacity(n)),
        geolocation: Geolocation::GeoTransform(spec.geotransform),
    };
    for (i, p) in pixels.iter().enumerate() {
        let (row, col) = (i / spec.width, i % spec.width);
        let infeasible = |why: &str| FireError::InfeasibleSpec(alloc::format!("pixel ({row}, {col}) {why}"));
        if [p.t4, p.t11, p.t12].iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(infeasible("has a non-positive temperature"));
        }
        let implied = classify_temperatures(&p.obs())?;
        if implied != p.class {
            return Err(infeasible(&alloc::format!("requests {} but its values give {}", p.class, implied)));
        }
        scene.l4.push(radiance_for(p.t4, LAMBDA_4));
        scene.l11.push(radiance_for(p.t11, LAMBDA_11));
        scene.l12.push(radiance_for(p.t12, LAMBDA_12));
        scene.rho065.as_mut().unwrap().push(p.rho065);
        scene.rho086.as_mut().unwrap().push(p.rho086);
        scene.solar_zenith.push(p.zenith_deg);
        scene.water_mask.as_mut().unwrap().push(p.class == PixelClass::Water);
        if classify_pixel(&scene.pixel(row, col))? != p.class {
            return Err(infeasible("sits on a threshold that radiance rounding cannot honour"));
        }
    }
    Ok(scene)
}
