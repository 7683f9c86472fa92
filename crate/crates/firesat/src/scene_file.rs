//! Binary scene container.
//!
//! ```text
//! magic      8 bytes   "FIRESCN1"
//! header_len u32 LE
//! header     JSON, header_len bytes
//! planes     width·height f32 LE values per channel, in header order
//! ```
//!
//! A stored value `raw` decodes to `raw · scale + offset`; NaN marks a missing
//! sample. The water mask is stored as 0/1.

use std::path::Path;

use firesat_core::firedetect::{Geolocation, SceneRaster};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};
use crate::io::atomic_write;

pub const MAGIC: &[u8; 8] = b"FIRESCN1";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelInfo {
    pub name: String,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub offset: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneHeader {
    pub version: u32,
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub channels: Vec<ChannelInfo>,
    /// Present unless `lat`/`lon` planes are stored.
    #[serde(default)]
    pub geotransform: Option<[f64; 6]>,
}

const L4: &str = "l4";
const L11: &str = "l11";
const L12: &str = "l12";
const RHO065: &str = "rho065";
const RHO086: &str = "rho086";
const ZENITH: &str = "solar_zenith";
const WATER: &str = "water_mask";
const LAT: &str = "lat";
const LON: &str = "lon";

fn bad(msg: impl Into<String>) -> AppError {
    AppError::SceneFormat(msg.into())
}

pub fn encode(scene: &SceneRaster) -> Result<Vec<u8>> {
    scene.validate()?;
    let mut planes: Vec<(&str, Vec<f64>)> =
        vec![(L4, scene.l4.clone()), (L11, scene.l11.clone()), (L12, scene.l12.clone())];
    if let Some(p) = &scene.rho065 {
        planes.push((RHO065, p.clone()));
    }
    if let Some(p) = &scene.rho086 {
        planes.push((RHO086, p.clone()));
    }
    planes.push((ZENITH, scene.solar_zenith.clone()));
    if let Some(m) = &scene.water_mask {
        planes.push((WATER, m.iter().map(|&w| if w { 1.0 } else { 0.0 }).collect()));
    }
    let geotransform = match &scene.geolocation {
        Geolocation::GeoTransform(g) => Some(*g),
        Geolocation::Planes { lat, lon } => {
            planes.push((LAT, lat.clone()));
            planes.push((LON, lon.clone()));
            None
        }
    };
    let header = SceneHeader {
        version: FORMAT_VERSION,
        id: scene.id.clone(),
        width: scene.width,
        height: scene.height,
        channels: planes.iter().map(|(n, _)| ChannelInfo { name: (*n).into(), scale: 1.0, offset: 0.0 }).collect(),
        geotransform,
    };
    let json = serde_json::to_vec(&header).map_err(|e| bad(e.to_string()))?;
    let mut out = Vec::with_capacity(12 + json.len() + planes.len() * scene.len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for (_, p) in &planes {
        for &v in p {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<SceneRaster> {
    if bytes.len() < 12 || &bytes[..8] != MAGIC {
        return Err(bad("bad magic"));
    }
    let hlen = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let body = &bytes[12..];
    if body.len() < hlen {
        return Err(bad("truncated header"));
    }
    let header: SceneHeader = serde_json::from_slice(&body[..hlen]).map_err(|e| bad(format!("header: {e}")))?;
    if header.version != FORMAT_VERSION {
        return Err(bad(format!("unsupported version {}", header.version)));
    }
    let n = header.width.checked_mul(header.height).ok_or_else(|| bad("dimensions overflow"))?;
    let data = &body[hlen..];
    if data.len() != header.channels.len() * n * 4 {
        return Err(bad(format!(
            "expected {} plane bytes for {} channels, found {}",
            header.channels.len() * n * 4,
            header.channels.len(),
            data.len()
        )));
    }
    let take = |k: usize, c: &ChannelInfo| -> Vec<f64> {
        data[k * n * 4..(k + 1) * n * 4]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64 * c.scale + c.offset)
            .collect()
    };
    let mut planes: Vec<(String, Vec<f64>)> = Vec::new();
    for (k, c) in header.channels.iter().enumerate() {
        if planes.iter().any(|(name, _)| *name == c.name) {
            return Err(bad(format!("duplicate channel {}", c.name)));
        }
        planes.push((c.name.clone(), take(k, c)));
    }
    let mut get = |name: &str| planes.iter().position(|(n, _)| n == name).map(|i| planes.swap_remove(i).1);
    let required = |p: Option<Vec<f64>>, name: &str| p.ok_or_else(|| bad(format!("missing channel {name}")));
    let l4 = required(get(L4), L4)?;
    let l11 = required(get(L11), L11)?;
    let l12 = required(get(L12), L12)?;
    let solar_zenith = required(get(ZENITH), ZENITH)?;
    let rho065 = get(RHO065);
    let rho086 = get(RHO086);
    let water_mask = get(WATER).map(|p| p.into_iter().map(|v| v > 0.5).collect());
    let geolocation = match (header.geotransform, get(LAT), get(LON)) {
        (_, Some(lat), Some(lon)) => Geolocation::Planes { lat, lon },
        (Some(g), None, None) => Geolocation::GeoTransform(g),
        _ => return Err(bad("need either a geotransform or both lat and lon planes")),
    };
    let scene = SceneRaster {
        id: header.id,
        width: header.width,
        height: header.height,
        l4,
        l11,
        l12,
        rho065,
        rho086,
        solar_zenith,
        water_mask,
        geolocation,
    };
    scene.validate()?;
    Ok(scene)
}

pub fn write_scene(path: &Path, scene: &SceneRaster) -> Result<()> {
    atomic_write(path, &encode(scene)?)
}

pub fn read_scene(path: &Path) -> Result<SceneRaster> {
    let bytes = std::fs::read(path).map_err(|e| AppError::io(path, e))?;
    decode(&bytes)
}

/// Rounds every plane through f32, as storing does.
pub fn quantize(scene: &SceneRaster) -> SceneRaster {
    let q = |p: &[f64]| p.iter().map(|&v| v as f32 as f64).collect::<Vec<_>>();
    SceneRaster {
        l4: q(&scene.l4),
        l11: q(&scene.l11),
        l12: q(&scene.l12),
        rho065: scene.rho065.as_deref().map(q),
        rho086: scene.rho086.as_deref().map(q),
        solar_zenith: q(&scene.solar_zenith),
        geolocation: match &scene.geolocation {
            Geolocation::Planes { lat, lon } => Geolocation::Planes { lat: q(lat), lon: q(lon) },
            g => g.clone(),
        },
        ..scene.clone()
    }
}
