//! Non-uniform bucket placement for angle quantisation.
//!
//! A compander maps the normalised angle `ψ ∈ [0, 1]` through a monotone
//! `f` with `f(0) = 0`, `f(1) = 1`; the bucket is `nint(n_max f(ψ))` and the
//! reconstruction is `f⁻¹(n / n_max)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sampling::SampleDomain;
use super::stats::ErrorStats;
use super::studies::round_trip_stats;
use crate::codec::{
    decode_magnitude, encode_unchecked, spherical_to_cartesian, to_spherical_unchecked, BitLayout,
    PrecisionPolicy,
};
use crate::error::{Error, Result};
use crate::real::nint;
use crate::vector::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Compander {
    Uniform,
    /// `f(ψ) = (1 − cos πψ) / 2`.
    Cosine,
    /// `f(ψ) = m [tanh(γ(2ψ − 1)) + c]` with `c = tanh γ`, `m = 1 / 2c`.
    Tanh {
        gamma: f64,
    },
}

impl Compander {
    pub fn map(&self, psi: f64) -> f64 {
        match *self {
            Compander::Uniform => psi,
            Compander::Cosine => (1.0 - (PI * psi).cos()) / 2.0,
            Compander::Tanh { gamma } => {
                let c = gamma.tanh();
                ((gamma * (2.0 * psi - 1.0)).tanh() + c) / (2.0 * c)
            }
        }
    }

    pub fn unmap(&self, f: f64) -> f64 {
        let f = f.clamp(0.0, 1.0);
        match *self {
            Compander::Uniform => f,
            Compander::Cosine => (1.0 - 2.0 * f).clamp(-1.0, 1.0).acos() / PI,
            Compander::Tanh { gamma } => {
                let c = gamma.tanh();
                let t = (2.0 * c * f - c).clamp(-c, c);
                (t.atanh() / gamma + 1.0) / 2.0
            }
        }
    }

    /// Bucket index of `psi ∈ [0, 1]`.
    pub fn compand(&self, psi: f64, n_max: u64) -> u64 {
        nint(n_max as f64 * self.map(psi)).clamp(0, n_max as i64) as u64
    }

    /// Normalised angle reconstructed from a bucket index.
    pub fn expand(&self, n: u64, n_max: u64) -> f64 {
        self.unmap(n as f64 / n_max as f64)
    }
}

impl fmt::Display for Compander {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Compander::Uniform => f.write_str("uniform"),
            Compander::Cosine => f.write_str("cosine"),
            Compander::Tanh { gamma } => write!(f, "tanh:{gamma}"),
        }
    }
}

/// Parses `uniform`, `cosine` or `tanh:GAMMA` with `GAMMA > 0`.
impl FromStr for Compander {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown compander `{s}`"));
        match s {
            "uniform" => Ok(Compander::Uniform),
            "cosine" => Ok(Compander::Cosine),
            _ => {
                let gamma: f64 = s
                    .strip_prefix("tanh:")
                    .ok_or_else(bad)?
                    .parse()
                    .map_err(|_| bad())?;
                if gamma.is_finite() && gamma > 0.0 {
                    Ok(Compander::Tanh { gamma })
                } else {
                    Err(bad())
                }
            }
        }
    }
}

/// The recommended codec with companders on φ and θ, all in double precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompandedCodec {
    pub layout: BitLayout,
    pub phi: Compander,
    pub theta: Compander,
}

impl CompandedCodec {
    pub fn compress(&self, v: Vec3<f32>) -> u64 {
        let s = to_spherical_unchecked(v, &PrecisionPolicy::oracle());
        let n_phi = self.phi.compand(s.phi / PI, self.layout.n_phi_max());
        let n_theta = self
            .theta
            .compand((s.theta + PI) / (2.0 * PI), self.layout.n_theta_max());
        let (field, _) = encode_unchecked(s.r as f32, self.layout.magnitude());
        self.layout.pack(field, n_phi, n_theta)
    }

    pub fn decompress(&self, word: u64) -> Vec3<f32> {
        let (field, n_phi, n_theta) = self.layout.unpack(word);
        let r = decode_magnitude(field, self.layout.magnitude());
        if r == 0.0 {
            return Vec3::default();
        }
        let phi = PI * self.phi.expand(n_phi, self.layout.n_phi_max());
        let theta = 2.0 * PI * self.theta.expand(n_theta, self.layout.n_theta_max()) - PI;
        spherical_to_cartesian(r as f64, theta, phi)
    }
}

/// Unnormalised round-trip error statistics with the given companders.
pub fn compand_study(
    domain: &SampleDomain,
    layout: &BitLayout,
    phi: Compander,
    theta: Compander,
) -> Result<ErrorStats> {
    let codec = CompandedCodec {
        layout: *layout,
        phi,
        theta,
    };
    round_trip_stats(domain, false, |v| codec.decompress(codec.compress(v)))
}
