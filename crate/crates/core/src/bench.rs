//! Vector-add kernels over raw and compressed streams, and a working-set
//! sweep timing both.
//!
//! Raw streams are interleaved `f32` triplets (12 bytes per element);
//! compressed streams are contiguous `u64` words (8 bytes per element).
//! Both kernels run single-threaded so the comparison isolates memory
//! traffic from scheduling.

use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::codec::{compress_unchecked, decompress, BitLayout, CompressedWord, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::vector::Vec3;

pub const RAW_ELEMENT_BYTES: u64 = 12;
pub const COMPRESSED_ELEMENT_BYTES: u64 = 8;

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// `c = a + b` elementwise in single precision.
pub fn add_raw(a: &[Vec3<f32>], b: &[Vec3<f32>]) -> Result<Vec<Vec3<f32>>> {
    let mut out = vec![Vec3::default(); a.len()];
    add_raw_into(a, b, &mut out)?;
    Ok(out)
}

pub fn add_raw_into(a: &[Vec3<f32>], b: &[Vec3<f32>], out: &mut [Vec3<f32>]) -> Result<()> {
    check_lengths(a.len(), b.len())?;
    check_lengths(a.len(), out.len())?;
    for ((c, x), y) in out.iter_mut().zip(a).zip(b) {
        *c = *x + *y;
    }
    Ok(())
}

/// `compress(decompress(aᵢ) + decompress(bᵢ))` for every element.
pub fn add_compressed(
    a: &[CompressedWord],
    b: &[CompressedWord],
    layout: &BitLayout,
    policy: &PrecisionPolicy,
) -> Result<Vec<CompressedWord>> {
    let mut out = vec![CompressedWord::default(); a.len()];
    add_compressed_into(a, b, &mut out, layout, policy)?;
    Ok(out)
}

pub fn add_compressed_into(
    a: &[CompressedWord],
    b: &[CompressedWord],
    out: &mut [CompressedWord],
    layout: &BitLayout,
    policy: &PrecisionPolicy,
) -> Result<()> {
    check_lengths(a.len(), b.len())?;
    check_lengths(a.len(), out.len())?;
    for ((c, x), y) in out.iter_mut().zip(a).zip(b) {
        let sum = decompress(*x, layout) + decompress(*y, layout);
        // sums of decoded finite vectors stay finite below f32::MAX / 2
        *c = compress_unchecked(sum, layout, policy).0;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub working_set_sweep: Vec<usize>,
    /// Timed repetitions per kernel and size; the median is reported.
    pub repeats: usize,
    pub layout: BitLayout,
    pub policy: PrecisionPolicy,
}

impl BenchConfig {
    pub fn new(working_set_sweep: Vec<usize>, repeats: usize) -> Result<Self> {
        if repeats < 3 {
            return Err(Error::InvalidArgument(format!(
                "need at least 3 repeats, got {repeats}"
            )));
        }
        if working_set_sweep.contains(&0) {
            return Err(Error::InvalidArgument(
                "element counts must be positive".into(),
            ));
        }
        Ok(Self {
            working_set_sweep,
            repeats,
            layout: BitLayout::recommended(),
            policy: PrecisionPolicy::default(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub n: usize,
    pub bytes_moved_raw: u64,
    pub bytes_moved_compressed: u64,
    pub time_raw_ns: u64,
    pub time_compressed_ns: u64,
    pub speedup: f64,
    pub bytes_ratio: f64,
}

impl BenchResult {
    /// Two streams read and one written per element.
    pub fn bytes_for(n: usize) -> (u64, u64) {
        (
            3 * RAW_ELEMENT_BYTES * n as u64,
            3 * COMPRESSED_ELEMENT_BYTES * n as u64,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchResult>,
    pub last_level_cache_bytes: Option<u64>,
    /// Largest swept `n` whose raw working set fits in the last-level cache.
    pub cache_knee: Option<usize>,
}

/// Size of the highest-level CPU cache as reported by sysfs, if available.
pub fn last_level_cache_bytes() -> Option<u64> {
    let dir = std::fs::read_dir("/sys/devices/system/cpu/cpu0/cache").ok()?;
    let mut best: Option<(u32, u64)> = None;
    for entry in dir.flatten() {
        let path = entry.path();
        if !path.file_name()?.to_str()?.starts_with("index") {
            continue;
        }
        let level: u32 = std::fs::read_to_string(path.join("level"))
            .ok()?
            .trim()
            .parse()
            .ok()?;
        let size = parse_cache_size(std::fs::read_to_string(path.join("size")).ok()?.trim())?;
        if best.is_none_or(|(l, _)| level > l) {
            best = Some((level, size));
        }
    }
    best.map(|(_, s)| s)
}

fn parse_cache_size(s: &str) -> Option<u64> {
    let (digits, unit) = s.split_at(s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len()));
    let n: u64 = digits.parse().ok()?;
    match unit {
        "" => Some(n),
        "K" => Some(n << 10),
        "M" => Some(n << 20),
        "G" => Some(n << 30),
        _ => None,
    }
}

/// Deterministic input vector `i` of stream `stream`, components in [−1, 1).
pub fn bench_input(stream: u64, i: usize) -> Vec3<f32> {
    let mut h = (i as u64) ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let mut next = || {
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        ((z >> 40) as f32 / (1u64 << 24) as f32) * 2.0 - 1.0
    };
    Vec3::new(next(), next(), next())
}

fn median(mut xs: Vec<u64>) -> u64 {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

fn time_repeats(repeats: usize, mut run: impl FnMut()) -> u64 {
    run(); // warm-up, discarded
    let times = (0..repeats)
        .map(|_| {
            let t = Instant::now();
            run();
            t.elapsed().as_nanos() as u64
        })
        .collect();
    median(times)
}

/// Times both kernels at one size. Raw and compressed buffers are never
/// live at the same time.
pub fn measure(
    n: usize,
    repeats: usize,
    layout: &BitLayout,
    policy: &PrecisionPolicy,
) -> BenchResult {
    let time_raw_ns = {
        let a: Vec<_> = (0..n).map(|i| bench_input(0, i)).collect();
        let b: Vec<_> = (0..n).map(|i| bench_input(1, i)).collect();
        let mut c = vec![Vec3::default(); n];
        time_repeats(repeats, || {
            add_raw_into(black_box(&a), black_box(&b), black_box(&mut c)).unwrap();
        })
    };
    let time_compressed_ns = {
        let a: Vec<_> = (0..n)
            .map(|i| compress_unchecked(bench_input(0, i), layout, policy).0)
            .collect();
        let b: Vec<_> = (0..n)
            .map(|i| compress_unchecked(bench_input(1, i), layout, policy).0)
            .collect();
        let mut c = vec![CompressedWord::default(); n];
        time_repeats(repeats, || {
            add_compressed_into(
                black_box(&a),
                black_box(&b),
                black_box(&mut c),
                layout,
                policy,
            )
            .unwrap();
        })
    };
    let (bytes_moved_raw, bytes_moved_compressed) = BenchResult::bytes_for(n);
    BenchResult {
        n,
        bytes_moved_raw,
        bytes_moved_compressed,
        time_raw_ns,
        time_compressed_ns,
        speedup: time_raw_ns as f64 / time_compressed_ns.max(1) as f64,
        bytes_ratio: bytes_moved_raw as f64 / bytes_moved_compressed as f64,
    }
}

pub fn sweep(config: &BenchConfig) -> BenchReport {
    let rows: Vec<_> = config
        .working_set_sweep
        .iter()
        .map(|&n| measure(n, config.repeats, &config.layout, &config.policy))
        .collect();
    let llc = last_level_cache_bytes();
    let cache_knee = llc.and_then(|cache| {
        rows.iter()
            .filter(|r| r.bytes_moved_raw <= cache)
            .map(|r| r.n)
            .max()
    });
    BenchReport {
        rows,
        last_level_cache_bytes: llc,
        cache_knee,
    }
}
