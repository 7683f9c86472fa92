//! Thin wrappers over `libm` so the crate builds without `std`.

pub(crate) use libm::{acos, atan2, cos, expm1, fabs, floor, fmod, log1p, log2, pow, sin, sqrt, tan};

pub(crate) const TAU: f64 = core::f64::consts::TAU;

#[inline]
pub(crate) fn deg(x: f64) -> f64 {
    x.to_degrees()
}

#[inline]
pub(crate) fn rad(x: f64) -> f64 {
    x.to_radians()
}

/// Wraps an angle in degrees into `[0, 360)`.
#[inline]
pub(crate) fn wrap_360(x: f64) -> f64 {
    let mut w = fmod(x, 360.0);
    if w < 0.0 {
        w += 360.0;
    }
    // adding 360 to a tiny negative remainder rounds to exactly 360
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// Wraps an angle in degrees into `(-180, 180]`.
#[inline]
pub(crate) fn wrap_180(x: f64) -> f64 {
    let w = wrap_360(x);
    if w > 180.0 {
        w - 360.0
    } else {
        w
    }
}

#[inline]
pub(crate) fn hypot3(x: f64, y: f64, z: f64) -> f64 {
    sqrt(x * x + y * y + z * z)
}

#[inline]
pub(crate) fn asin_clamped(x: f64) -> f64 {
    libm::asin(x.clamp(-1.0, 1.0))
}
