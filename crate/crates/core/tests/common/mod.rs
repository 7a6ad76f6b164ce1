//! Property checks shared by the `properties` and `acceptance` targets.
//!
//! Each check returns `Err` with a description of the first violation.

#![allow(dead_code)]

use std::f64::consts::PI;

use polar64::analysis::{sample, SampleDomain};
use polar64::codec::{
    decode_magnitude, dequantize_phi, dequantize_theta, encode_magnitude, quantize_phi,
    quantize_theta, to_spherical, MagnitudeFormat,
};
use polar64::stream::{read_stream, write_stream};
use polar64::{
    compress, decompress, predict_error, BitLayout, CompressedWord, Precision, PrecisionPolicy,
    Vec3f,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

/// `|θ − θ̂| ≤ π/n_θmax` and `|φ − φ̂| ≤ π/(2 n_φmax)` up to 4 ulp of the
/// quantisation precision, for `count` random angle pairs per layout.
pub fn quantisation_bounds(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layouts = [
        BitLayout::recommended(),
        BitLayout::sign_reclaimed(),
        BitLayout::base(),
    ];
    let mut worst = (0.0f64, 0.0f64);
    for i in 0..count {
        let layout = &layouts[i % layouts.len()];
        let theta = rng.random_range(-PI..PI);
        let phi = rng.random_range(0.0..=PI);
        let (nt, np) = (layout.n_theta_max(), layout.n_phi_max());
        for precision in [Precision::Single, Precision::Double] {
            let (ti, pi, slack_t, slack_p) = match precision {
                Precision::Single => {
                    let (t, p) = (theta as f32, phi as f32);
                    let ulp = |x: f32| (f32::from_bits(x.abs().to_bits() + 1) - x.abs()) as f64;
                    (
                        quantize_theta(t, nt),
                        quantize_phi(p, np),
                        4.0 * ulp(t),
                        4.0 * ulp(p),
                    )
                }
                Precision::Double => (
                    quantize_theta(theta, nt),
                    quantize_phi(phi, np),
                    4.0 * f64::EPSILON * PI,
                    4.0 * f64::EPSILON * PI,
                ),
            };
            let et = (theta - dequantize_theta::<f64>(ti, nt)).abs();
            let ep = (phi - dequantize_phi::<f64>(pi, np)).abs();
            if et > PI / nt as f64 + slack_t {
                return Err(format!(
                    "θ={theta} on {layout} ({precision:?}): error {et:e}"
                ));
            }
            if ep > PI / (2.0 * np as f64) + slack_p {
                return Err(format!("φ={phi} on {layout} ({precision:?}): error {ep:e}"));
            }
            worst = (
                worst.0.max(et * nt as f64 / PI),
                worst.1.max(ep * 2.0 * np as f64 / PI),
            );
        }
    }
    Ok(format!(
        "{count} angle pairs; worst θ error {:.6}·π/n_θmax, worst φ error {:.6}·π/(2n_φmax)",
        worst.0, worst.1
    ))
}

/// Round-trip error `≤ 2 (‖predict_error‖ + r 2^-22)` over `count` vectors
/// with magnitudes spread over `[1e-8, 1e8]`.
pub fn error_envelope(count: usize, seed: u64) -> Check {
    let layout = BitLayout::recommended();
    let policy = PrecisionPolicy::default();
    let oracle = PrecisionPolicy::oracle();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for v in sample(&SampleDomain::cube(count, seed)) {
        let scale = 10f32.powi(rng.random_range(-8..=8));
        let v = Vec3f::new(v.x * scale, v.y * scale, v.z * scale);
        if v.norm() == 0.0 {
            continue;
        }
        let s = to_spherical(v, &oracle).unwrap();
        let bound = 2.0 * (predict_error(&s, &layout).norm() + s.r * 2f64.powi(-22));
        let err = v.distance(&decompress(compress(v, &layout, &policy).unwrap(), &layout));
        if err > bound {
            return Err(format!("{v:?}: error {err:e} above envelope {bound:e}"));
        }
        worst = worst.max(err / bound);
    }
    Ok(format!(
        "{count} vectors; largest error/envelope ratio {worst:.3}"
    ))
}

/// Quantisation nodes survive another cycle: angle indices through
/// decompress/compress (θ only away from the poles), magnitude fields
/// through decode/encode, and polar-axis vectors bit-exactly.
pub fn node_round_trip(count: usize, seed: u64) -> Check {
    let layout = BitLayout::recommended();
    let oracle = PrecisionPolicy::oracle();
    let format = *layout.magnitude();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let small = MagnitudeFormat::new(0, 4, 6, 7).unwrap();
    let mut fields = vec![0u64];
    fields.extend(
        (1..=small.max_exponent_field() as u64).flat_map(|e| (0..64u64).map(move |m| (e << 6) | m)),
    );
    for &f in &fields {
        let back = encode_magnitude(decode_magnitude(f, &small), &small)
            .unwrap()
            .0;
        if back != f {
            return Err(format!(
                "magnitude field {f:#x} of ⟨0,4,6⟩ re-encodes to {back:#x}"
            ));
        }
    }

    let max_e = format.max_exponent_field() as u64;
    let m = format.mantissa_bits();
    for _ in 0..count {
        let field = (rng.random_range(1..=max_e) << m) | rng.random_range(0..1u64 << m);
        let r = decode_magnitude(field, &format);
        if encode_magnitude(r, &format).unwrap().0 != field {
            return Err(format!("magnitude field {field:#x} does not re-encode"));
        }
        let n_phi = rng.random_range(0..=layout.n_phi_max());
        let n_theta = rng.random_range(0..=layout.n_theta_max());
        let w = CompressedWord(layout.pack(field, n_phi, n_theta));
        let (_, p2, t2) = layout.unpack(
            compress(decompress(w, &layout), &layout, &oracle)
                .unwrap()
                .0,
        );
        let at_pole = n_phi == 0 || n_phi == layout.n_phi_max();
        if p2 != n_phi || (!at_pole && t2 != n_theta) {
            return Err(format!(
                "node (n_φ={n_phi}, n_θ={n_theta}) re-encodes to ({p2}, {t2})"
            ));
        }
        let axis = Vec3f::new(0.0, 0.0, r);
        let back = decompress(compress(axis, &layout, &oracle).unwrap(), &layout);
        if back != axis {
            return Err(format!("{axis:?} decompresses to {back:?}"));
        }
    }
    Ok(format!(
        "{} ⟨0,4,6⟩ fields exhaustively, {count} random ⟨0,7,22⟩-17-18 nodes and polar-axis vectors",
        fields.len()
    ))
}

/// Words that differ only in `n_θ` at `φ̂ ∈ {0, π}` decode within `r 2^-22`.
pub fn pole_degeneracy(count: usize, seed: u64) -> Check {
    let layout = BitLayout::recommended();
    let format = *layout.magnitude();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = format.mantissa_bits();
    let mut worst = 0.0f64;
    for _ in 0..count {
        let field = (rng.random_range(1..=format.max_exponent_field() as u64) << m)
            | rng.random_range(0..1u64 << m);
        let r = decode_magnitude(field, &format) as f64;
        for n_phi in [0, layout.n_phi_max()] {
            let a = rng.random_range(0..=layout.n_theta_max());
            let b = rng.random_range(0..=layout.n_theta_max());
            let va = decompress(CompressedWord(layout.pack(field, n_phi, a)), &layout);
            let vb = decompress(CompressedWord(layout.pack(field, n_phi, b)), &layout);
            let d = va.distance(&vb);
            if d > r * 2f64.powi(-22) {
                return Err(format!(
                    "n_φ={n_phi}, n_θ {a} vs {b}: distance {d:e} at r={r:e}"
                ));
            }
            worst = worst.max(d / r);
        }
    }
    Ok(format!(
        "{count} magnitude fields at both poles; largest distance/r {worst:e}"
    ))
}

/// write → read → write is byte-identical for random layouts and words.
pub fn stream_byte_identity(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let e = rng.random_range(2..=8u8);
        let s = rng.random_range(0..=1u8);
        let m = rng.random_range(1..=23u8);
        let left = 64 - (s + e + m);
        let p = rng.random_range(1..left);
        let layout =
            match BitLayout::from_parts(s, e, m, p, left - p, polar64::codec::default_bias(e)) {
                Ok(l) => l,
                Err(_) => continue,
            };
        let words: Vec<_> = (0..rng.random_range(0..200))
            .map(|_| CompressedWord(rng.random()))
            .collect();
        let mut first = Vec::new();
        write_stream(&mut first, &layout, &words).unwrap();
        let (l2, w2) = read_stream(&mut first.as_slice()).unwrap();
        let mut second = Vec::new();
        write_stream(&mut second, &l2, &w2).unwrap();
        if first != second || l2 != layout || w2 != words {
            return Err(format!(
                "stream {i} with layout {layout} changed on rewrite"
            ));
        }
    }
    Ok(format!("{count} random streams"))
}
