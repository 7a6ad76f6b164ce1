//! Framed on-disk format for compressed vector streams.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "VC3C"
//!      4     1  version (1)
//!      5     5  s, e, m, p, t
//!     10     1  exponent bias
//!     11     1  reserved, zero
//!     12     8  word count, little-endian u64
//!     20   8·n  words, little-endian u64
//! ```

use std::io::{self, Read, Write};

use crate::codec::{BitLayout, CompressedWord};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"VC3C";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamHeader {
    pub layout: BitLayout,
    pub count: u64,
}

impl StreamHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        let m = self.layout.magnitude();
        out[..4].copy_from_slice(&MAGIC);
        out[4] = VERSION;
        out[5] = m.sign_bits() as u8;
        out[6] = m.exponent_bits() as u8;
        out[7] = m.mantissa_bits() as u8;
        out[8] = self.layout.phi_bits() as u8;
        out[9] = self.layout.theta_bits() as u8;
        out[10] = m.bias() as u8;
        out[12..].copy_from_slice(&self.count.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8; HEADER_LEN]) -> Result<Self> {
        let magic: [u8; 4] = bytes[..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(Error::BadMagic(magic));
        }
        if bytes[4] != VERSION {
            return Err(Error::UnsupportedVersion(bytes[4]));
        }
        let layout =
            BitLayout::from_parts(bytes[5], bytes[6], bytes[7], bytes[8], bytes[9], bytes[10])
                .map_err(|e| Error::BadLayout(e.to_string()))?;
        let count = u64::from_le_bytes(bytes[12..].try_into().unwrap());
        Ok(Self { layout, count })
    }
}

/// Reads until `buf` is full or the source ends; returns bytes read.
fn read_full(r: &mut impl Read, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(k) => filled += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

pub fn read_header(r: &mut impl Read) -> Result<StreamHeader> {
    let mut buf = [0u8; HEADER_LEN];
    let got = read_full(r, &mut buf)?;
    let prefix = got.min(4);
    if buf[..prefix] != MAGIC[..prefix] {
        let mut magic = [0u8; 4];
        magic[..prefix].copy_from_slice(&buf[..prefix]);
        return Err(Error::BadMagic(magic));
    }
    if got < HEADER_LEN {
        return Err(Error::TruncatedStream {
            expected: HEADER_LEN as u64,
            found: got as u64,
        });
    }
    StreamHeader::from_bytes(&buf)
}

pub fn write_stream(
    w: &mut impl Write,
    layout: &BitLayout,
    words: &[CompressedWord],
) -> Result<()> {
    w.write_all(
        &StreamHeader {
            layout: *layout,
            count: words.len() as u64,
        }
        .to_bytes(),
    )?;
    let mut buf = Vec::with_capacity(8 * words.len().min(1 << 16));
    for chunk in words.chunks(1 << 16) {
        buf.clear();
        chunk
            .iter()
            .for_each(|x| buf.extend_from_slice(&x.0.to_le_bytes()));
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_stream(r: &mut impl Read) -> Result<(BitLayout, Vec<CompressedWord>)> {
    let header = read_header(r)?;
    let expected = header.count.checked_mul(8).ok_or(Error::TruncatedStream {
        expected: u64::MAX,
        found: 0,
    })?;
    let mut words = Vec::new();
    let mut buf = vec![0u8; 8 << 16];
    let mut remaining = expected;
    let mut found = 0u64;
    while remaining > 0 {
        let want = remaining.min(buf.len() as u64) as usize;
        let got = read_full(r, &mut buf[..want])?;
        found += got as u64;
        if got < want {
            return Err(Error::TruncatedStream {
                expected: HEADER_LEN as u64 + expected,
                found: HEADER_LEN as u64 + found,
            });
        }
        words.extend(
            buf[..got]
                .chunks_exact(8)
                .map(|c| CompressedWord(u64::from_le_bytes(c.try_into().unwrap()))),
        );
        remaining -= got as u64;
    }
    Ok((header.layout, words))
}
