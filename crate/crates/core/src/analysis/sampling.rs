//! Deterministic, chunk-parallel sample generation.
//!
//! Samples are produced in fixed-size chunks; chunk `c` draws from a
//! ChaCha8 stream keyed by `(seed, c)`, so the samples do not depend on how
//! chunks are scheduled across threads.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vec3;

pub const CHUNK_LEN: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DomainKind {
    /// Area-uniform on S²: θ ~ U[−π, π), cos φ ~ U[−1, 1].
    UnitSphere,
    /// Points on S² with θ ~ U[−π, π) and φ ~ U[0, π], denser toward the poles.
    SphereUniformAngles,
    /// Uniform on [−1, 1]³.
    Cube,
    /// Volume-uniform in the spherical shell `r_min ≤ r ≤ r_max`.
    Shell { r_min: f64, r_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleDomain {
    pub kind: DomainKind,
    pub count: usize,
    pub seed: u64,
}

impl SampleDomain {
    pub fn new(kind: DomainKind, count: usize, seed: u64) -> Self {
        Self { kind, count, seed }
    }

    pub fn sphere(count: usize, seed: u64) -> Self {
        Self::new(DomainKind::UnitSphere, count, seed)
    }

    pub fn cube(count: usize, seed: u64) -> Self {
        Self::new(DomainKind::Cube, count, seed)
    }

    pub fn shell(r_min: f64, r_max: f64, count: usize, seed: u64) -> Self {
        Self::new(DomainKind::Shell { r_min, r_max }, count, seed)
    }

    pub fn chunk_count(&self) -> usize {
        self.count.div_ceil(CHUNK_LEN)
    }

    /// The samples of chunk `index`, generated in double precision and
    /// narrowed to single precision.
    pub fn chunk(&self, index: usize) -> Vec<Vec3<f32>> {
        let start = index * CHUNK_LEN;
        let len = CHUNK_LEN.min(self.count.saturating_sub(start));
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        (0..len).map(|_| self.draw(&mut rng)).collect()
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec3<f32> {
        let v = match self.kind {
            DomainKind::UnitSphere => area_uniform_direction(rng),
            DomainKind::SphereUniformAngles => {
                let theta = rng.random_range(-PI..PI);
                let phi = rng.random_range(0.0..=PI);
                from_angles(1.0, theta, phi)
            }
            DomainKind::Cube => Vec3::new(
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            ),
            DomainKind::Shell { r_min, r_max } => {
                let dir = area_uniform_direction(rng);
                let r = if r_min == r_max {
                    r_min
                } else {
                    let (lo, hi) = (r_min.powi(3), r_max.powi(3));
                    (lo + rng.random::<f64>() * (hi - lo)).cbrt()
                };
                Vec3::new(r * dir.x, r * dir.y, r * dir.z)
            }
        };
        Vec3::new(v.x as f32, v.y as f32, v.z as f32)
    }

    /// Runs `f` over every chunk, in parallel, returning results in chunk order.
    pub fn map_chunks<A, F>(&self, f: F) -> Vec<A>
    where
        A: Send,
        F: Fn(&[Vec3<f32>]) -> A + Sync + Send,
    {
        (0..self.chunk_count())
            .into_par_iter()
            .map(|c| f(&self.chunk(c)))
            .collect()
    }
}

/// All samples of the domain.
pub fn sample(domain: &SampleDomain) -> Vec<Vec3<f32>> {
    domain.map_chunks(|c| c.to_vec()).concat()
}

fn area_uniform_direction(rng: &mut ChaCha8Rng) -> Vec3<f64> {
    let theta = rng.random_range(-PI..PI);
    let cos_phi: f64 = rng.random_range(-1.0..=1.0);
    let sin_phi = (1.0 - cos_phi * cos_phi).max(0.0).sqrt();
    Vec3::new(sin_phi * theta.cos(), sin_phi * theta.sin(), cos_phi)
}

fn from_angles(r: f64, theta: f64, phi: f64) -> Vec3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(r * ct * sp, r * st * sp, r * cp)
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::UnitSphere => f.write_str("sphere"),
            DomainKind::SphereUniformAngles => f.write_str("sphere-angles"),
            DomainKind::Cube => f.write_str("cube"),
            DomainKind::Shell { r_min, r_max } => write!(f, "shell:{r_min}:{r_max}"),
        }
    }
}

/// Parses `sphere`, `sphere-angles`, `cube` or `shell:MIN:MAX`.
impl FromStr for DomainKind {
    type Err = Error;

    fn from_str(src: &str) -> Result<Self> {
        let bad = || Error::InvalidLayout(format!("unknown domain `{src}`"));
        match src.trim() {
            "sphere" => Ok(DomainKind::UnitSphere),
            "sphere-angles" => Ok(DomainKind::SphereUniformAngles),
            "cube" => Ok(DomainKind::Cube),
            other => {
                let rest = other.strip_prefix("shell:").ok_or_else(bad)?;
                let (a, b) = rest.split_once(':').ok_or_else(bad)?;
                let r_min: f64 = a.parse().map_err(|_| bad())?;
                let r_max: f64 = b.parse().map_err(|_| bad())?;
                if !(r_min >= 0.0 && r_max >= r_min && r_max.is_finite()) {
                    return Err(bad());
                }
                Ok(DomainKind::Shell { r_min, r_max })
            }
        }
    }
}
