//! Round-trip error, anisotropy, precision and idempotence studies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::sampling::{DomainKind, SampleDomain};
use super::stats::{merge_all, ErrorAccumulator, ErrorStats};
use crate::codec::{
    compress_unchecked, decompress, quantize_in, to_spherical_unchecked, BitLayout, Precision,
    PrecisionPolicy,
};
use crate::error::{Error, Result};
use crate::vector::Vec3;

/// Error of one reconstruction, optionally relative to `‖v‖`.
#[inline]
fn sample_error(v: &Vec3<f32>, rec: &Vec3<f32>, normalised: bool) -> f64 {
    let e = v.distance(rec);
    if normalised {
        let r = v.cast::<f64>().norm();
        if r > 0.0 {
            e / r
        } else {
            0.0
        }
    } else {
        e
    }
}

/// Error statistics of an arbitrary round trip over the domain.
pub fn round_trip_stats<F>(
    domain: &SampleDomain,
    normalised: bool,
    round_trip: F,
) -> Result<ErrorStats>
where
    F: Fn(Vec3<f32>) -> Vec3<f32> + Sync + Send,
{
    if domain.count == 0 {
        return Err(Error::EmptyDomain);
    }
    let parts = domain.map_chunks(|chunk| {
        chunk
            .iter()
            .map(|v| sample_error(v, &round_trip(*v), normalised))
            .collect::<ErrorAccumulator>()
    });
    Ok(merge_all(&parts).finish(normalised))
}

/// `e_i = ‖v_i − v̂_i‖₂` over the domain, optionally divided by `‖v_i‖₂`.
pub fn error_study(
    domain: &SampleDomain,
    layout: &BitLayout,
    policy: &PrecisionPolicy,
    normalised: bool,
) -> Result<ErrorStats> {
    round_trip_stats(domain, normalised, |v| {
        decompress(compress_unchecked(v, layout, policy).0, layout)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub count: u64,
    pub mean: f64,
}

/// Per-cell mean error over a `(θ, φ)` grid, θ ∈ [−π, π) by φ ∈ [0, π].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyMap {
    pub n_theta_cells: usize,
    pub n_phi_cells: usize,
    /// Row-major by φ cell: index `phi_cell * n_theta_cells + theta_cell`.
    pub cells: Vec<CellStats>,
    /// Largest single-sample error seen.
    pub global_max: f64,
}

impl AnisotropyMap {
    pub fn cell(&self, theta_cell: usize, phi_cell: usize) -> CellStats {
        self.cells[phi_cell * self.n_theta_cells + theta_cell]
    }

    /// Largest over smallest per-cell mean, over non-empty cells.
    pub fn ratio(&self) -> f64 {
        let (lo, hi) = self
            .cells
            .iter()
            .filter(|c| c.count > 0)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), c| {
                (lo.min(c.mean), hi.max(c.mean))
            });
        hi / lo
    }

    /// `(theta_cell, phi_cell, mean_error)` rows for heat-map plotting.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_phi_cells)
            .flat_map(move |p| (0..self.n_theta_cells).map(move |t| (t, p, self.cell(t, p).mean)))
    }
}

/// Bins samples by their exact `(θ, φ)` and reports the mean error per cell.
pub fn anisotropy_map(
    domain: &SampleDomain,
    layout: &BitLayout,
    policy: &PrecisionPolicy,
    grid: (usize, usize),
) -> Result<AnisotropyMap> {
    let (n_theta_cells, n_phi_cells) = grid;
    if n_theta_cells == 0 || n_phi_cells == 0 {
        return Err(Error::InvalidArgument(
            "anisotropy grid needs at least one cell".into(),
        ));
    }
    if domain.count == 0 {
        return Err(Error::EmptyDomain);
    }
    let cells = n_theta_cells * n_phi_cells;
    let parts = domain.map_chunks(|chunk| {
        let mut acc = vec![(0u64, 0.0f64, 0.0f64); cells];
        for v in chunk {
            let s = to_spherical_unchecked(*v, &PrecisionPolicy::oracle());
            let t = (((s.theta + PI) / (2.0 * PI)) * n_theta_cells as f64) as usize;
            let p = ((s.phi / PI) * n_phi_cells as f64) as usize;
            let idx = p.min(n_phi_cells - 1) * n_theta_cells + t.min(n_theta_cells - 1);
            let e = sample_error(
                v,
                &decompress(compress_unchecked(*v, layout, policy).0, layout),
                false,
            );
            acc[idx].0 += 1;
            acc[idx].1 += e;
            acc[idx].2 = acc[idx].2.max(e);
        }
        acc
    });
    let mut totals = vec![(0u64, 0.0f64); cells];
    let mut global_max = 0.0f64;
    for part in &parts {
        for (tot, (n, sum, max)) in totals.iter_mut().zip(part) {
            tot.0 += n;
            tot.1 += sum;
            global_max = global_max.max(*max);
        }
    }
    let cells = totals
        .into_iter()
        .map(|(count, sum)| CellStats {
            count,
            mean: if count > 0 { sum / count as f64 } else { 0.0 },
        })
        .collect();
    Ok(AnisotropyMap {
        n_theta_cells,
        n_phi_cells,
        cells,
        global_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRow {
    pub policy: PrecisionPolicy,
    pub domain: DomainKind,
    pub stats: ErrorStats,
}

/// Normalised error for the four θ/φ precision combinations on S² and on
/// [−1, 1]³; quantisation runs in single precision throughout.
pub fn precision_comparison(
    count: usize,
    seed: u64,
    layout: &BitLayout,
) -> Result<Vec<PrecisionRow>> {
    use Precision::{Double, Single};
    let mut rows = Vec::with_capacity(8);
    for kind in [DomainKind::UnitSphere, DomainKind::Cube] {
        let domain = SampleDomain::new(kind, count, seed);
        for (theta, phi) in [
            (Single, Single),
            (Single, Double),
            (Double, Single),
            (Double, Double),
        ] {
            let policy = PrecisionPolicy::new(theta, phi, Single);
            let stats = error_study(&domain, layout, &policy, true)?;
            rows.push(PrecisionRow {
                policy,
                domain: kind,
                stats,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinMisses {
    pub count: u64,
    pub theta_misses: u64,
    pub phi_misses: u64,
}

impl BinMisses {
    pub fn theta_fraction(&self) -> f64 {
        self.theta_misses as f64 / self.count as f64
    }
    pub fn phi_fraction(&self) -> f64 {
        self.phi_misses as f64 / self.count as f64
    }
}

/// Counts samples whose bucket indices differ between two pipelines.
pub fn bin_miss_between(
    domain: &SampleDomain,
    layout: &BitLayout,
    a: &PrecisionPolicy,
    b: &PrecisionPolicy,
) -> Result<BinMisses> {
    if domain.count == 0 {
        return Err(Error::EmptyDomain);
    }
    let grid = layout.grid();
    let parts = domain.map_chunks(|chunk| {
        let mut m = (0u64, 0u64);
        for v in chunk {
            let qa = quantize_in(&to_spherical_unchecked(*v, a), grid, a.quantisation);
            let qb = quantize_in(&to_spherical_unchecked(*v, b), grid, b.quantisation);
            m.0 += (qa.n_theta != qb.n_theta) as u64;
            m.1 += (qa.n_phi != qb.n_phi) as u64;
        }
        m
    });
    let (theta_misses, phi_misses) = parts
        .iter()
        .fold((0, 0), |acc, m| (acc.0 + m.0, acc.1 + m.1));
    Ok(BinMisses {
        count: domain.count as u64,
        theta_misses,
        phi_misses,
    })
}

/// Single against double angle intermediates, both quantised in double.
pub fn bin_miss_study(domain: &SampleDomain, layout: &BitLayout) -> Result<BinMisses> {
    let single = PrecisionPolicy {
        quantisation: Precision::Double,
        ..PrecisionPolicy::all_single()
    };
    bin_miss_between(domain, layout, &single, &PrecisionPolicy::oracle())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdempotenceReport {
    pub count: u64,
    /// Fraction with `compress(decompress(w₁)) ≠ w₁`.
    pub word_miss_fraction: f64,
    /// Fraction whose angle fields alone change.
    pub angle_miss_fraction: f64,
    /// Fraction with `w₃ = w₂` one cycle later.
    pub third_cycle_stable_fraction: f64,
    /// `2u · 2^(b − m)` for angle width `b` and intermediate significand `m`.
    pub predicted_bound: f64,
    pub ulp_budget: u32,
}

pub const DEFAULT_ULP_BUDGET: u32 = 8;

/// Bound on the fraction of words that change under one more
/// decompress/compress cycle.
pub fn idempotence_bound(layout: &BitLayout, policy: &PrecisionPolicy, ulp_budget: u32) -> f64 {
    let angle_bits = layout.phi_bits().max(layout.theta_bits()) as i32;
    let m = policy.narrowest_mantissa_digits() as i32;
    2.0 * ulp_budget as f64 * 2f64.powi(angle_bits - m)
}

pub fn idempotence_study(
    domain: &SampleDomain,
    layout: &BitLayout,
    policy: &PrecisionPolicy,
    ulp_budget: u32,
) -> Result<IdempotenceReport> {
    if domain.count == 0 {
        return Err(Error::EmptyDomain);
    }
    let cycle = |w| compress_unchecked(decompress(w, layout), layout, policy).0;
    let parts = domain.map_chunks(|chunk| {
        let mut m = [0u64; 3];
        for v in chunk {
            let w1 = compress_unchecked(*v, layout, policy).0;
            let w2 = cycle(w1);
            let w3 = cycle(w2);
            let (_, p1, t1) = layout.unpack(w1.0);
            let (_, p2, t2) = layout.unpack(w2.0);
            m[0] += (w2 != w1) as u64;
            m[1] += (p1 != p2 || t1 != t2) as u64;
            m[2] += (w3 == w2) as u64;
        }
        m
    });
    let [misses, angle_misses, stable] = parts.iter().fold([0; 3], |acc, m| {
        [acc[0] + m[0], acc[1] + m[1], acc[2] + m[2]]
    });
    let n = domain.count as f64;
    Ok(IdempotenceReport {
        count: domain.count as u64,
        word_miss_fraction: misses as f64 / n,
        angle_miss_fraction: angle_misses as f64 / n,
        third_cycle_stable_fraction: stable as f64 / n,
        predicted_bound: idempotence_bound(layout, policy, ulp_budget),
        ulp_budget,
    })
}
