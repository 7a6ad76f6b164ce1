use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent bias of IEEE-754 single precision.
pub const F32_BIAS: i32 = 127;
const F32_MANTISSA_BITS: u32 = 23;

/// The reduced floating-point format used to store the vector magnitude.
///
/// Exponent field value 0 is reserved for an exact zero magnitude and the
/// all-ones value is never produced, so normal exponents occupy
/// `1 ..= 2^e - 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MagnitudeFormat {
    sign_bits: u8,
    exponent_bits: u8,
    mantissa_bits: u8,
    bias: u8,
}

impl MagnitudeFormat {
    pub fn new(sign_bits: u8, exponent_bits: u8, mantissa_bits: u8, bias: u8) -> Result<Self> {
        if sign_bits > 1 {
            return Err(Error::InvalidLayout(format!(
                "sign bits must be 0 or 1, got {sign_bits}"
            )));
        }
        if !(2..=8).contains(&exponent_bits) {
            return Err(Error::InvalidLayout(format!(
                "exponent bits must be in 2..=8, got {exponent_bits}"
            )));
        }
        if !(1..=23).contains(&mantissa_bits) {
            return Err(Error::InvalidLayout(format!(
                "mantissa bits must be in 1..=23, got {mantissa_bits}"
            )));
        }
        let (lo, hi) = bias_range(exponent_bits);
        if (bias as i32) < lo || (bias as i32) > hi {
            return Err(Error::InvalidLayout(format!(
                "bias {bias} outside {lo}..={hi} for a {exponent_bits}-bit exponent"
            )));
        }
        Ok(Self {
            sign_bits,
            exponent_bits,
            mantissa_bits,
            bias,
        })
    }

    /// Format with the default bias for its exponent width.
    pub fn with_default_bias(sign_bits: u8, exponent_bits: u8, mantissa_bits: u8) -> Result<Self> {
        Self::new(
            sign_bits,
            exponent_bits,
            mantissa_bits,
            default_bias(exponent_bits),
        )
    }

    pub fn sign_bits(&self) -> u32 {
        self.sign_bits as u32
    }
    pub fn exponent_bits(&self) -> u32 {
        self.exponent_bits as u32
    }
    pub fn mantissa_bits(&self) -> u32 {
        self.mantissa_bits as u32
    }
    pub fn bias(&self) -> i32 {
        self.bias as i32
    }

    pub fn total_bits(&self) -> u32 {
        self.sign_bits() + self.exponent_bits() + self.mantissa_bits()
    }

    /// Largest exponent field value used for finite magnitudes.
    pub fn max_exponent_field(&self) -> u32 {
        (1 << self.exponent_bits) - 2
    }

    /// Number of f32 mantissa bits dropped by truncation.
    pub(crate) fn dropped_bits(&self) -> u32 {
        F32_MANTISSA_BITS - self.mantissa_bits()
    }

    /// Smallest nonzero magnitude this format can represent.
    pub fn min_positive(&self) -> f32 {
        f32::from_bits(((1 + F32_BIAS - self.bias()) as u32) << F32_MANTISSA_BITS)
    }

    /// Largest finite magnitude this format can represent.
    pub fn max_finite(&self) -> f32 {
        let e8 = (self.max_exponent_field() as i32 + F32_BIAS - self.bias()) as u32;
        let mant = ((1u32 << self.mantissa_bits) - 1) << self.dropped_bits();
        f32::from_bits((e8 << F32_MANTISSA_BITS) | mant)
    }
}

/// Admissible biases: normal fields `1 ..= 2^e - 2` must map into the f32
/// normal exponent range `1 ..= 254`.
fn bias_range(exponent_bits: u8) -> (i32, i32) {
    let top = (1i32 << exponent_bits) - 2;
    ((top - 127).max(0), F32_BIAS)
}

/// 127 for a full exponent, 80 for a 7-bit exponent, otherwise the
/// symmetric IEEE-style bias `2^(e-1) - 1`.
pub fn default_bias(exponent_bits: u8) -> u8 {
    match exponent_bits {
        8 => 127,
        7 => 80,
        e => ((1u32 << (e.clamp(1, 8) - 1)) - 1) as u8,
    }
}

/// Bucket counts for the two angles: indices run over `0 ..= n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngleGrid {
    pub n_phi_max: u64,
    pub n_theta_max: u64,
}

impl AngleGrid {
    pub fn from_bits(phi_bits: u32, theta_bits: u32) -> Self {
        Self {
            n_phi_max: (1u64 << phi_bits) - 1,
            n_theta_max: (1u64 << theta_bits) - 1,
        }
    }
}

/// Partition of the 64-bit word written `⟨s,e,m⟩-p-t`.
///
/// Fields from the most significant bit down: the magnitude
/// (sign, exponent, mantissa), then `p` bits of `n_phi`, then `t` bits of
/// `n_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitLayout {
    magnitude: MagnitudeFormat,
    phi_bits: u8,
    theta_bits: u8,
}

impl BitLayout {
    pub fn new(magnitude: MagnitudeFormat, phi_bits: u8, theta_bits: u8) -> Result<Self> {
        if !(1..=32).contains(&phi_bits) || !(1..=32).contains(&theta_bits) {
            return Err(Error::InvalidLayout(format!(
                "angle fields must be 1..=32 bits, got p={phi_bits} t={theta_bits}"
            )));
        }
        let total = magnitude.total_bits() + phi_bits as u32 + theta_bits as u32;
        if total != 64 {
            return Err(Error::InvalidLayout(format!(
                "fields sum to {total} bits, not 64"
            )));
        }
        Ok(Self {
            magnitude,
            phi_bits,
            theta_bits,
        })
    }

    /// Builds a layout from raw widths and an explicit bias.
    pub fn from_parts(s: u8, e: u8, m: u8, p: u8, t: u8, bias: u8) -> Result<Self> {
        Self::new(MagnitudeFormat::new(s, e, m, bias)?, p, t)
    }

    /// `⟨0,8,23⟩-16-17`: sign bit reclaimed for the θ field.
    pub fn sign_reclaimed() -> Self {
        Self::from_parts(0, 8, 23, 16, 17, 127).unwrap()
    }

    /// `⟨0,7,23⟩-17-17` with bias 80.
    pub fn exponent_reduced() -> Self {
        Self::from_parts(0, 7, 23, 17, 17, 80).unwrap()
    }

    /// `⟨0,7,22⟩-17-18` with bias 80, the recommended layout.
    pub fn recommended() -> Self {
        Self::from_parts(0, 7, 22, 17, 18, 80).unwrap()
    }

    /// `⟨1,8,23⟩-16-16`: the magnitude kept as a plain f32.
    pub fn base() -> Self {
        Self::from_parts(1, 8, 23, 16, 16, 127).unwrap()
    }

    pub fn magnitude(&self) -> &MagnitudeFormat {
        &self.magnitude
    }
    pub fn phi_bits(&self) -> u32 {
        self.phi_bits as u32
    }
    pub fn theta_bits(&self) -> u32 {
        self.theta_bits as u32
    }
    pub fn n_phi_max(&self) -> u64 {
        (1u64 << self.phi_bits) - 1
    }
    pub fn n_theta_max(&self) -> u64 {
        (1u64 << self.theta_bits) - 1
    }
    pub fn grid(&self) -> AngleGrid {
        AngleGrid::from_bits(self.phi_bits(), self.theta_bits())
    }

    #[inline(always)]
    pub fn pack(&self, magnitude: u64, n_phi: u64, n_theta: u64) -> u64 {
        let t = self.theta_bits();
        let p = self.phi_bits();
        (magnitude << (p + t)) | (n_phi << t) | n_theta
    }

    /// Splits a word into `(magnitude, n_phi, n_theta)` fields.
    #[inline(always)]
    pub fn unpack(&self, word: u64) -> (u64, u64, u64) {
        let t = self.theta_bits();
        let p = self.phi_bits();
        let n_theta = word & self.n_theta_max();
        let n_phi = (word >> t) & self.n_phi_max();
        let magnitude = word.checked_shr(p + t).unwrap_or(0);
        (magnitude, n_phi, n_theta)
    }
}

impl Default for BitLayout {
    fn default() -> Self {
        Self::recommended()
    }
}

impl fmt::Display for BitLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.magnitude;
        write!(
            f,
            "⟨{},{},{}⟩-{}-{}",
            m.sign_bits, m.exponent_bits, m.mantissa_bits, self.phi_bits, self.theta_bits
        )
    }
}

impl FromStr for BitLayout {
    type Err = Error;

    /// Accepts `s,e,m-p-t`, optionally wrapped as `⟨s,e,m⟩-p-t` or
    /// `<s,e,m>-p-t`, with an optional `/bias` suffix.
    fn from_str(src: &str) -> Result<Self> {
        let bad = || Error::LayoutParse(src.to_string());
        let cleaned: String = src
            .trim()
            .chars()
            .filter(|c| !matches!(c, '⟨' | '⟩' | '<' | '>' | ' '))
            .collect();
        let (body, bias) = match cleaned.split_once('/') {
            Some((b, bias)) => (b, Some(bias.parse::<u8>().map_err(|_| bad())?)),
            None => (cleaned.as_str(), None),
        };
        let mut dash = body.split('-');
        let head = dash.next().ok_or_else(bad)?;
        let p: u8 = dash.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let t: u8 = dash.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if dash.next().is_some() {
            return Err(bad());
        }
        let sem: Vec<u8> = head
            .split(',')
            .map(|x| x.parse::<u8>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [s, e, m] = sem[..] else {
            return Err(bad());
        };
        Self::from_parts(s, e, m, p, t, bias.unwrap_or_else(|| default_bias(e)))
    }
}
