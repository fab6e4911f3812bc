//! Radial differential operators on hyperbolic 3-space.
//!
//! For a radial function `f(rho)` the hyperbolic Laplacian is
//! `f'' + 2 coth(rho) f'`; the scalar curvature of the conformal metric
//! `f^4 (d rho^2 + sinh^2 rho d sigma^2)` is
//! `f^{-5} (-6 f - 8 (f'' + 2 coth(rho) f'))`.

use crate::error::{Error, Result};
use crate::geometry::profile::RadialProfile;

/// Hyperbolic Laplacian of a radial profile at an interior point `rho > 0`.
pub fn radial_laplacian(f: &RadialProfile, rho: f64) -> Result<f64> {
    if rho <= 0.0 {
        return Err(Error::Range(format!(
            "radial laplacian needs rho > 0 (coth singularity), got {rho}"
        )));
    }
    if rho <= f.min_rho() || rho >= f.max_rho() {
        return Err(Error::Range(format!(
            "rho = {rho} at or outside grid range ({}, {})",
            f.min_rho(),
            f.max_rho()
        )));
    }
    Ok(f.d2(rho)? + 2.0 / rho.tanh() * f.d1(rho)?)
}

/// Laplacian of an even radial profile at the pole, `3 f''(0)`. The caller
/// asserts evenness; the grid must start at 0.
pub fn radial_laplacian_at_origin(f: &RadialProfile) -> Result<f64> {
    if f.min_rho() != 0.0 {
        return Err(Error::Range("grid does not reach rho = 0".into()));
    }
    Ok(3.0 * f.d2(0.0)?)
}

/// Laplacian from explicit derivative values, usable when the caller has
/// analytic derivatives instead of a sampled profile.
pub fn radial_laplacian_parts(rho: f64, d1: f64, d2: f64) -> f64 {
    d2 + 2.0 / rho.tanh() * d1
}

/// Scalar curvature of `f^4 ds^2_{H^3}` at `rho` from a sampled profile.
pub fn scalar_curvature_radial(f: &RadialProfile, rho: f64) -> Result<f64> {
    let v = f.value(rho)?;
    if v <= 0.0 {
        return Err(Error::InvalidConformalFactor { rho, value: v });
    }
    let lap = radial_laplacian(f, rho)?;
    Ok(scalar_curvature_parts(v, lap))
}

/// Scalar curvature from value and Laplacian.
pub fn scalar_curvature_parts(value: f64, laplacian: f64) -> f64 {
    value.powi(-5) * (-6.0 * value - 8.0 * laplacian)
}
