//! Fixed-rate compression of single-precision 3-vectors into 64-bit words.
//!
//! A vector `(x, y, z)` is converted to spherical coordinates, the two
//! angles are quantised to integer bucket indices and the magnitude is kept
//! in a narrowed floating-point format, all packed into one `u64`. The
//! default layout `⟨0,7,22⟩-17-18` spends 29 bits on the magnitude, 17 on
//! the polar angle and 18 on the azimuth.
//!
//! ```
//! use polar64::{compress, decompress, BitLayout, PrecisionPolicy, Vec3f};
//!
//! let layout = BitLayout::recommended();
//! let v = Vec3f::new(0.25, -1.5, 3.0);
//! let w = compress(v, &layout, &PrecisionPolicy::default()).unwrap();
//! let back = decompress(w, &layout);
//! assert!(v.distance(&back) / (v.norm() as f64) < 3e-4);
//! ```
//!
//! Besides the codec the crate carries the numerical studies used to
//! characterise it ([`analysis`]), a bandwidth benchmark ([`bench`]) and a
//! small framed stream format ([`stream`]).

pub mod analysis;
pub mod bench;
pub mod codec;
mod error;
pub mod real;
pub mod stream;
mod vector;

pub use codec::{
    compress, compress_tracked, decompress, predict_error, BitLayout, CompressedWord,
    MagnitudeClass, Precision, PrecisionPolicy, SphericalTriple,
};
pub use error::{Error, Result};
pub use real::Real;
pub use vector::Vec3;

/// Single-precision vector, the codec's input and output type.
pub type Vec3f = Vec3<f32>;
/// Double-precision vector, used for sampling and error accounting.
pub type Vec3d = Vec3<f64>;
