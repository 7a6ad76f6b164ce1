//! Reduced floating-point storage of the vector magnitude.

use serde::{Deserialize, Serialize};

use super::layout::{MagnitudeFormat, F32_BIAS};
use crate::error::{Error, Result};

const F32_MANTISSA_MASK: u32 = (1 << 23) - 1;

/// What happened to a magnitude on its way into the reduced format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MagnitudeClass {
    Zero,
    Normal,
    /// Below the smallest normal value; raised to [`MagnitudeFormat::min_positive`].
    Flushed,
    /// Above the largest finite value; clamped to [`MagnitudeFormat::max_finite`].
    Saturated,
}

/// Encodes `r` into the `s+e+m` bit magnitude field.
///
/// The exponent is re-biased and the mantissa tail is truncated. Zero maps
/// to the all-zero field; values too small for the format (including f32
/// subnormals) become the smallest normal value and values too large
/// saturate.
pub fn encode_magnitude(r: f32, format: &MagnitudeFormat) -> Result<(u64, MagnitudeClass)> {
    if !r.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    if r < 0.0 {
        return Err(Error::NegativeMagnitude(r));
    }
    Ok(encode_unchecked(r, format))
}

#[inline(always)]
pub(crate) fn encode_unchecked(r: f32, format: &MagnitudeFormat) -> (u64, MagnitudeClass) {
    let bits = r.to_bits() & 0x7fff_ffff;
    if bits == 0 {
        return (0, MagnitudeClass::Zero);
    }
    let m = format.mantissa_bits();
    let biased = (bits >> 23) as i32;
    let field = biased - F32_BIAS + format.bias();
    let max_field = format.max_exponent_field() as i32;
    let (exponent, mantissa, class) = if biased == 0 || field < 1 {
        (1, 0, MagnitudeClass::Flushed)
    } else if field > max_field {
        (max_field as u32, (1u32 << m) - 1, MagnitudeClass::Saturated)
    } else {
        (
            field as u32,
            (bits & F32_MANTISSA_MASK) >> format.dropped_bits(),
            MagnitudeClass::Normal,
        )
    };
    ((((exponent as u64) << m) | mantissa as u64), class)
}

/// Reconstructs the magnitude from its field; dropped mantissa bits read as zero.
///
/// Any sign bit is ignored. A field with exponent 0 decodes to zero and the
/// unused all-ones exponent decodes as the largest finite exponent, so every
/// bit pattern yields a finite non-negative value.
#[inline(always)]
pub fn decode_magnitude(field: u64, format: &MagnitudeFormat) -> f32 {
    let m = format.mantissa_bits();
    let exponent = ((field >> m) & ((1u64 << format.exponent_bits()) - 1)) as u32;
    if exponent == 0 {
        return 0.0;
    }
    let exponent = exponent.min(format.max_exponent_field()) as i32;
    let biased = (exponent + F32_BIAS - format.bias()) as u32;
    let mantissa = ((field & ((1u64 << m) - 1)) as u32) << format.dropped_bits();
    f32::from_bits((biased << 23) | mantissa)
}
