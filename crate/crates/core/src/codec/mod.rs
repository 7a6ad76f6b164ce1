//! The 96-to-64-bit vector codec.
//!
//! A vector is written as `(r, θ, φ)`; the two angles are quantised onto
//! uniform integer grids and `r` is stored in a reduced floating-point
//! format. All functions are pure and safe to call concurrently.

mod angles;
mod layout;
mod magnitude;
mod policy;
mod word;

pub use angles::{
    dequantize_angles, dequantize_phi, dequantize_theta, quantize_angles, quantize_phi,
    quantize_theta, to_spherical, QuantizedAngles, SphericalTriple,
};
pub use layout::{default_bias, AngleGrid, BitLayout, MagnitudeFormat};
pub use magnitude::{decode_magnitude, encode_magnitude, MagnitudeClass};
pub use policy::{Precision, PrecisionPolicy};
pub use word::{
    compress, compress_tracked, decompress, decompress_in, predict_error, CompressedWord,
};

pub(crate) use angles::{quantize_in, to_spherical_unchecked};
pub(crate) use magnitude::encode_unchecked;
pub(crate) use word::{compress_unchecked, spherical_to_cartesian};
