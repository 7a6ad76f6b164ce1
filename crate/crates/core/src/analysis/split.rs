//! Joint encoding of the two bucket indices in a shared bit field.
//!
//! With `n_p = n_φ (n_θmax + 1) + n_θ` the φ/θ split need not fall on a
//! bit boundary; `n_θmax` follows from `n_φmax` and the field width.

use serde::{Deserialize, Serialize};

use super::sampling::SampleDomain;
use super::stats::ErrorStats;
use super::studies::round_trip_stats;
use crate::codec::{
    decode_magnitude, dequantize_phi, dequantize_theta, encode_unchecked, quantize_phi,
    quantize_theta, spherical_to_cartesian, to_spherical_unchecked, MagnitudeFormat,
    PrecisionPolicy,
};
use crate::error::{Error, Result};
use crate::vector::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub total_bits: u32,
    pub n_phi_max: u64,
    pub n_theta_max: u64,
}

impl SplitConfig {
    /// Splits `total_bits` so that φ gets `phi_buckets = n_φmax + 1` buckets
    /// and θ the largest count that still fits.
    pub fn new(total_bits: u32, phi_buckets: u64) -> Result<Self> {
        if !(2..=62).contains(&total_bits) {
            return Err(Error::InvalidSplit(format!(
                "total bits {total_bits} outside 2..=62"
            )));
        }
        let capacity = 1u64 << total_bits;
        if phi_buckets < 2 || phi_buckets > capacity / 2 {
            return Err(Error::InvalidSplit(format!(
                "{phi_buckets} φ buckets leave fewer than two θ buckets in {total_bits} bits"
            )));
        }
        let theta_buckets = capacity / phi_buckets;
        Self::with_maxima(total_bits, phi_buckets - 1, theta_buckets - 1)
    }

    pub fn with_maxima(total_bits: u32, n_phi_max: u64, n_theta_max: u64) -> Result<Self> {
        let joint_max = (n_phi_max as u128 + 1) * (n_theta_max as u128 + 1) - 1;
        if n_phi_max == 0 || n_theta_max == 0 || joint_max >= 1u128 << total_bits {
            return Err(Error::InvalidSplit(format!(
                "(n_φmax+1)(n_θmax+1) − 1 = {joint_max} does not fit in {total_bits} bits"
            )));
        }
        Ok(Self {
            total_bits,
            n_phi_max,
            n_theta_max,
        })
    }

    #[inline]
    pub fn encode(&self, n_phi: u64, n_theta: u64) -> u64 {
        n_phi * (self.n_theta_max + 1) + n_theta
    }

    #[inline]
    pub fn decode(&self, joint: u64) -> (u64, u64) {
        (
            joint / (self.n_theta_max + 1),
            joint % (self.n_theta_max + 1),
        )
    }
}

/// A codec whose angle field is the joint index of a [`SplitConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCodec {
    pub magnitude: MagnitudeFormat,
    pub split: SplitConfig,
    pub policy: PrecisionPolicy,
}

impl SplitCodec {
    pub fn new(
        magnitude: MagnitudeFormat,
        split: SplitConfig,
        policy: PrecisionPolicy,
    ) -> Result<Self> {
        if magnitude.total_bits() + split.total_bits != 64 {
            return Err(Error::InvalidSplit(format!(
                "magnitude {} + angles {} bits ≠ 64",
                magnitude.total_bits(),
                split.total_bits
            )));
        }
        Ok(Self {
            magnitude,
            split,
            policy,
        })
    }

    pub fn compress(&self, v: Vec3<f32>) -> u64 {
        let s = to_spherical_unchecked(v, &self.policy);
        let (n_theta, n_phi) = match self.policy.quantisation {
            crate::Precision::Single => (
                quantize_theta(s.theta as f32, self.split.n_theta_max),
                quantize_phi(s.phi as f32, self.split.n_phi_max),
            ),
            crate::Precision::Double => (
                quantize_theta(s.theta, self.split.n_theta_max),
                quantize_phi(s.phi, self.split.n_phi_max),
            ),
        };
        let (field, _) = encode_unchecked(s.r as f32, &self.magnitude);
        (field << self.split.total_bits) | self.split.encode(n_phi, n_theta)
    }

    pub fn decompress(&self, word: u64) -> Vec3<f32> {
        let r = decode_magnitude(word >> self.split.total_bits, &self.magnitude);
        if r == 0.0 {
            return Vec3::default();
        }
        let (n_phi, n_theta) = self
            .split
            .decode(word & ((1u64 << self.split.total_bits) - 1));
        let theta: f64 = dequantize_theta(n_theta, self.split.n_theta_max);
        let phi: f64 = dequantize_phi(n_phi, self.split.n_phi_max);
        spherical_to_cartesian(r as f64, theta, phi)
    }
}

/// Magnitude format paired with a `total_bits` angle field in a 64-bit
/// word: no sign bit, a 7-bit exponent with bias 80, and the rest mantissa.
pub fn magnitude_for_angle_bits(total_bits: u32) -> Result<MagnitudeFormat> {
    let mantissa = 64i64 - total_bits as i64 - 7;
    if !(1..=23).contains(&mantissa) {
        return Err(Error::InvalidSplit(format!(
            "{total_bits} angle bits leave {mantissa} mantissa bits"
        )));
    }
    MagnitudeFormat::new(0, 7, mantissa as u8, 80)
}

/// Error statistics for each φ bucket count in `phi_buckets`.
pub fn split_sweep(
    total_bits: u32,
    phi_buckets: &[u64],
    domain: &SampleDomain,
) -> Result<Vec<(SplitConfig, ErrorStats)>> {
    let magnitude = magnitude_for_angle_bits(total_bits)?;
    phi_buckets
        .iter()
        .map(|&b| {
            let codec = SplitCodec::new(
                magnitude,
                SplitConfig::new(total_bits, b)?,
                PrecisionPolicy::oracle(),
            )?;
            let stats = round_trip_stats(domain, false, |v| codec.decompress(codec.compress(v)))?;
            Ok((codec.split, stats))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sample;
    use crate::codec::{compress, BitLayout};

    #[test]
    fn joint_index_round_trips_exhaustively_at_8_bits() {
        for phi_buckets in 2..=128u64 {
            let cfg = SplitConfig::new(8, phi_buckets).unwrap();
            assert!((cfg.n_phi_max + 1) * (cfg.n_theta_max + 1) <= 256);
            let mut seen = std::collections::HashSet::new();
            for n_phi in 0..=cfg.n_phi_max {
                for n_theta in 0..=cfg.n_theta_max {
                    let j = cfg.encode(n_phi, n_theta);
                    assert!(j < 256);
                    assert!(seen.insert(j));
                    assert_eq!(cfg.decode(j), (n_phi, n_theta));
                }
            }
        }
    }

    #[test]
    fn capacity_violations_rejected() {
        assert!(SplitConfig::with_maxima(8, 15, 16).is_err());
        assert!(SplitConfig::with_maxima(8, 15, 15).is_ok());
        assert!(SplitConfig::new(8, 1).is_err());
        assert!(SplitConfig::new(8, 129).is_err());
        assert!(SplitConfig::new(70, 4).is_err());
    }

    #[test]
    fn power_of_two_split_is_the_bitfield_layout() {
        let cfg = SplitConfig::new(35, 1 << 17).unwrap();
        assert_eq!(
            (cfg.n_phi_max, cfg.n_theta_max),
            ((1 << 17) - 1, (1 << 18) - 1)
        );
        let codec = SplitCodec::new(
            magnitude_for_angle_bits(35).unwrap(),
            cfg,
            PrecisionPolicy::oracle(),
        )
        .unwrap();
        let layout = BitLayout::recommended();
        for v in sample(&SampleDomain::sphere(20_000, 8)) {
            let w = compress(v, &layout, &PrecisionPolicy::oracle()).unwrap();
            assert_eq!(codec.compress(v), w.bits());
        }
    }

    #[test]
    fn fractional_split_reconstructs() {
        let cfg = SplitConfig::new(35, 98_304).unwrap();
        assert_eq!(cfg.n_theta_max, (1u64 << 35) / 98_304 - 1);
        let codec = SplitCodec::new(
            magnitude_for_angle_bits(35).unwrap(),
            cfg,
            PrecisionPolicy::oracle(),
        )
        .unwrap();
        for v in sample(&SampleDomain::sphere(5_000, 9)) {
            let back = codec.decompress(codec.compress(v));
            assert!(v.distance(&back) < 3e-5);
        }
    }
}
