use std::fmt;

use serde::{Deserialize, Serialize};

use super::angles::{
    dequantize_phi, dequantize_theta, quantize_in, to_spherical_unchecked, QuantizedAngles,
    SphericalTriple,
};
use super::layout::BitLayout;
use super::magnitude::{decode_magnitude, encode_unchecked, MagnitudeClass};
use super::policy::PrecisionPolicy;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::vector::Vec3;

/// One packed 64-bit output unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[repr(transparent)]
pub struct CompressedWord(pub u64);

impl CompressedWord {
    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn fields(self, layout: &BitLayout) -> (u64, QuantizedAngles) {
        let (magnitude, n_phi, n_theta) = layout.unpack(self.0);
        (magnitude, QuantizedAngles { n_theta, n_phi })
    }
}

impl fmt::LowerHex for CompressedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Compresses one vector into a 64-bit word.
pub fn compress(
    v: Vec3<f32>,
    layout: &BitLayout,
    policy: &PrecisionPolicy,
) -> Result<CompressedWord> {
    compress_tracked(v, layout, policy).map(|(w, _)| w)
}

/// Like [`compress`], also reporting whether the magnitude was flushed or saturated.
pub fn compress_tracked(
    v: Vec3<f32>,
    layout: &BitLayout,
    policy: &PrecisionPolicy,
) -> Result<(CompressedWord, MagnitudeClass)> {
    if !v.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    Ok(compress_unchecked(v, layout, policy))
}

#[inline(always)]
pub(crate) fn compress_unchecked(
    v: Vec3<f32>,
    layout: &BitLayout,
    policy: &PrecisionPolicy,
) -> (CompressedWord, MagnitudeClass) {
    let s = to_spherical_unchecked(v, policy);
    let q = quantize_in(&s, layout.grid(), policy.quantisation);
    let (field, class) = encode_unchecked(s.r as f32, layout.magnitude());
    (
        CompressedWord(layout.pack(field, q.n_phi, q.n_theta)),
        class,
    )
}

/// Reconstructs the vector, with trigonometry in double precision.
#[inline]
pub fn decompress(w: CompressedWord, layout: &BitLayout) -> Vec3<f32> {
    decompress_in::<f64>(w, layout)
}

/// Reconstructs the vector with the angle maps and trigonometry evaluated in `T`.
#[inline(always)]
pub fn decompress_in<T: Real>(w: CompressedWord, layout: &BitLayout) -> Vec3<f32> {
    let (field, n_phi, n_theta) = layout.unpack(w.0);
    let r = decode_magnitude(field, layout.magnitude());
    if r == 0.0 {
        return Vec3::default();
    }
    let theta: T = dequantize_theta(n_theta, layout.n_theta_max());
    let phi: T = dequantize_phi(n_phi, layout.n_phi_max());
    spherical_to_cartesian(T::of_f32(r), theta, phi)
}

#[inline(always)]
pub(crate) fn spherical_to_cartesian<T: Real>(r: T, theta: T, phi: T) -> Vec3<f32> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(
        (r * ct * sp).as_f32(),
        (r * st * sp).as_f32(),
        (r * cp).as_f32(),
    )
}

/// First-order error vector for worst-case quantisation errors
/// `ε_θ = π / n_θmax` and `ε_φ = π / (2 n_φmax)`.
///
/// Serves as an envelope for measured round-trip errors; it is not part of
/// the codec path.
pub fn predict_error(s: &SphericalTriple, layout: &BitLayout) -> Vec3<f64> {
    let eps_theta = std::f64::consts::PI / layout.n_theta_max() as f64;
    let eps_phi = std::f64::consts::PI / (2.0 * layout.n_phi_max() as f64);
    let (st, ct) = s.theta.sin_cos();
    let (sp, cp) = s.phi.sin_cos();
    Vec3::new(
        s.r * (eps_phi * ct * cp - eps_theta * st * sp),
        s.r * (eps_phi * st * cp + eps_theta * ct * sp),
        s.r * eps_phi * sp,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::to_spherical;
    use std::f64::consts::PI;

    #[test]
    fn zero_vector_has_zero_magnitude_field() {
        let l = BitLayout::recommended();
        let w = compress(Vec3::new(0.0, 0.0, 0.0), &l, &PrecisionPolicy::default()).unwrap();
        assert_eq!(w.fields(&l).0, 0);
        assert_eq!(decompress(w, &l), Vec3::new(0.0, 0.0, 0.0));
    }

    #[test]
    fn zero_magnitude_ignores_angle_bits() {
        let l = BitLayout::recommended();
        for angles in [0u64, 1, (1 << 35) - 1, 0x5_5555_5555] {
            assert_eq!(decompress(CompressedWord(angles), &l), Vec3::default());
        }
    }

    #[test]
    fn pole_is_reconstructed() {
        let l = BitLayout::recommended();
        let w = compress(Vec3::new(0.0, 0.0, 1.0), &l, &PrecisionPolicy::default()).unwrap();
        let v = decompress(w, &l);
        assert!(v.distance(&Vec3::new(0.0, 0.0, 1.0)) <= 1.2e-7);
        assert_eq!(v.x, 0.0);
        assert_eq!(v.y, 0.0);
    }

    #[test]
    fn x_axis_within_table_max() {
        let l = BitLayout::recommended();
        let w = compress(Vec3::new(1.0, 0.0, 0.0), &l, &PrecisionPolicy::default()).unwrap();
        assert!(decompress(w, &l).distance(&Vec3::new(1.0, 0.0, 0.0)) <= 6.5e-5);
    }

    #[test]
    fn magnitude_of_3_4_0() {
        let l = BitLayout::recommended();
        let w = compress(Vec3::new(3.0, 4.0, 0.0), &l, &PrecisionPolicy::default()).unwrap();
        let v = decompress(w, &l);
        let r = v.norm() as f64;
        assert!((r - 5.0).abs() / 5.0 <= 2f64.powi(-22) + 1e-7);
    }

    #[test]
    fn rejects_non_finite() {
        let l = BitLayout::recommended();
        let bad = Vec3::new(1.0, f32::NAN, 0.0);
        assert!(matches!(
            compress(bad, &l, &PrecisionPolicy::default()),
            Err(Error::NonFiniteInput)
        ));
    }

    #[test]
    fn every_word_decodes_finite() {
        let l = BitLayout::recommended();
        let mut w = 0x9e37_79b9_7f4a_7c15u64;
        for _ in 0..10_000 {
            w = w
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            assert!(decompress(CompressedWord(w), &l).is_finite());
        }
        assert!(decompress(CompressedWord(u64::MAX), &l).is_finite());
    }

    #[test]
    fn predicted_error_at_pole_and_equator() {
        let l = BitLayout::recommended();
        let eps_phi = PI / (2.0 * 131071.0);
        let eps_theta = PI / 262143.0;
        let e = predict_error(
            &SphericalTriple {
                r: 2.0,
                theta: 0.3,
                phi: 0.0,
            },
            &l,
        );
        assert!((e.x - 2.0 * eps_phi * 0.3f64.cos()).abs() < 1e-18);
        assert_eq!(e.z, 0.0);
        let e = predict_error(
            &SphericalTriple {
                r: 1.0,
                theta: 0.0,
                phi: PI / 2.0,
            },
            &l,
        );
        assert!(e.x.abs() < 1e-20);
        assert!((e.y - eps_theta).abs() < 1e-18);
        assert!((e.z - eps_phi).abs() < 1e-18);
    }

    #[test]
    fn policy_changes_only_through_intermediates() {
        let l = BitLayout::recommended();
        let v = Vec3::new(0.3f32, -0.7, 0.2);
        let s = to_spherical(v, &PrecisionPolicy::oracle()).unwrap();
        for p in [
            PrecisionPolicy::oracle(),
            PrecisionPolicy::default(),
            PrecisionPolicy::all_single(),
        ] {
            let (_, q) = compress(v, &l, &p).unwrap().fields(&l);
            let (th, ph) = super::super::dequantize_angles(q, l.grid());
            assert!((th - s.theta).abs() < 2.0 * PI / 262143.0);
            assert!((ph - s.phi).abs() < PI / 131071.0);
        }
    }
}
