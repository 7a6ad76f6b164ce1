//! Cartesian to spherical transform and uniform angle quantisation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::layout::AngleGrid;
use super::policy::{Precision, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::real::{nint, Real};
use crate::vector::Vec3;

/// `(r, θ, φ)` with `r ≥ 0`, `θ ∈ [−π, π)`, `φ ∈ [0, π]`.
///
/// Stored in double precision; values produced by a single-precision
/// pipeline are exactly representable here.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SphericalTriple {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct QuantizedAngles {
    pub n_theta: u64,
    pub n_phi: u64,
}

#[inline(always)]
pub(crate) fn theta_in<T: Real>(v: Vec3<f32>) -> T {
    let x = T::of_f32(v.x);
    let y = T::of_f32(v.y);
    if x == T::zero() && y == T::zero() {
        return T::zero();
    }
    let theta = y.atan2(x);
    if theta < T::PI() {
        theta
    } else if y > T::zero() {
        // true angle is just below π but rounded up to it
        T::PI() * (T::one() - T::epsilon())
    } else {
        -T::PI()
    }
}

#[inline(always)]
pub(crate) fn norm_in<T: Real>(v: Vec3<f32>) -> T {
    Vec3::new(T::of_f32(v.x), T::of_f32(v.y), T::of_f32(v.z)).norm()
}

/// φ with the norm, the quotient and the arccosine all evaluated in `T`.
#[inline(always)]
pub(crate) fn phi_in<T: Real>(v: Vec3<f32>) -> T {
    let r = norm_in::<T>(v);
    if r == T::zero() {
        return T::zero();
    }
    let q = T::of_f32(v.z) / r;
    q.max(-T::one()).min(T::one()).acos()
}

/// Converts to spherical coordinates under the given precision policy.
///
/// θ uses the quadrant-aware arctangent with `atan2(0, 0) = 0`. The zero
/// vector maps to `(0, 0, 0)`. The magnitude is computed in the wider of
/// the θ and φ precisions.
pub fn to_spherical(v: Vec3<f32>, policy: &PrecisionPolicy) -> Result<SphericalTriple> {
    if !v.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    Ok(to_spherical_unchecked(v, policy))
}

#[inline(always)]
pub(crate) fn to_spherical_unchecked(v: Vec3<f32>, policy: &PrecisionPolicy) -> SphericalTriple {
    let r = match policy.magnitude() {
        Precision::Single => norm_in::<f32>(v) as f64,
        Precision::Double => norm_in::<f64>(v),
    };
    if r == 0.0 {
        return SphericalTriple::default();
    }
    let theta = match policy.theta {
        Precision::Single => theta_in::<f32>(v) as f64,
        Precision::Double => theta_in::<f64>(v),
    };
    let phi = match policy.phi {
        Precision::Single => phi_in::<f32>(v) as f64,
        Precision::Double => phi_in::<f64>(v),
    };
    SphericalTriple { r, theta, phi }
}

#[inline(always)]
fn clamp_index(n: i64, n_max: u64) -> u64 {
    n.clamp(0, n_max as i64) as u64
}

/// `nint(n_max (θ + π) / 2π)` without forming `θ + π`.
///
/// With `x = n_max θ / 2π` the index is `n_max/2 + x` rounded; for odd
/// `n_max` this is `(n_max + 1)/2 + floor(x)`, for even `n_max` it is
/// `n_max/2 + nint(x)`. Only the sign of `x` has to be carried through the
/// rounding, so small angles keep their full relative precision.
#[inline(always)]
pub fn quantize_theta<T: Real>(theta: T, n_max: u64) -> u64 {
    let x = theta * T::of_f64(n_max as f64 / (2.0 * PI));
    let n = if n_max % 2 == 1 {
        (n_max as i64 + 1) / 2 + x.floor().to_i64().unwrap_or(0)
    } else {
        n_max as i64 / 2 + nint(x)
    };
    clamp_index(n, n_max)
}

/// `nint(n_max φ / π)`.
#[inline(always)]
pub fn quantize_phi<T: Real>(phi: T, n_max: u64) -> u64 {
    let x = phi * T::of_f64(n_max as f64 / PI);
    clamp_index(nint(x), n_max)
}

/// Quantises both angles in the policy's quantisation precision.
pub fn quantize_angles(
    s: &SphericalTriple,
    grid: AngleGrid,
    policy: &PrecisionPolicy,
) -> QuantizedAngles {
    quantize_in(s, grid, policy.quantisation)
}

#[inline(always)]
pub(crate) fn quantize_in(
    s: &SphericalTriple,
    grid: AngleGrid,
    precision: Precision,
) -> QuantizedAngles {
    match precision {
        Precision::Single => QuantizedAngles {
            n_theta: quantize_theta(s.theta as f32, grid.n_theta_max),
            n_phi: quantize_phi(s.phi as f32, grid.n_phi_max),
        },
        Precision::Double => QuantizedAngles {
            n_theta: quantize_theta(s.theta, grid.n_theta_max),
            n_phi: quantize_phi(s.phi, grid.n_phi_max),
        },
    }
}

/// `θ̂ = π (2 n_θ / n_θmax − 1)`.
#[inline(always)]
pub fn dequantize_theta<T: Real>(n_theta: u64, n_max: u64) -> T {
    let two = T::one() + T::one();
    T::PI() * (two * T::from_u64(n_theta).unwrap() / T::from_u64(n_max).unwrap() - T::one())
}

/// `φ̂ = π n_φ / n_φmax`.
#[inline(always)]
pub fn dequantize_phi<T: Real>(n_phi: u64, n_max: u64) -> T {
    T::PI() * T::from_u64(n_phi).unwrap() / T::from_u64(n_max).unwrap()
}

/// Reconstructed `(θ̂, φ̂)` in double precision.
pub fn dequantize_angles(q: QuantizedAngles, grid: AngleGrid) -> (f64, f64) {
    (
        dequantize_theta(q.n_theta, grid.n_theta_max),
        dequantize_phi(q.n_phi, grid.n_phi_max),
    )
}
