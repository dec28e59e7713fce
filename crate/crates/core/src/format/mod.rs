//! Bit-exact file formats.
//!
//! All integers and floats are little-endian.
//!
//! **TTOK** (token grid), 28-byte header then payload:
//!
//! | offset | type  | field                  |
//! |--------|-------|------------------------|
//! | 0      | [u8;4]| magic `TTOK`           |
//! | 4      | u16   | version = 1            |
//! | 6      | u16   | flags = 0              |
//! | 8      | u32×5 | B, F, H, W, C          |
//! | 28     | f32…  | `[B][F][H][W][C]` values |
//!
//! **TTKZ** (compressed output), 42-byte header then four sections:
//!
//! | offset | type  | field                       |
//! |--------|-------|-----------------------------|
//! | 0      | [u8;4]| magic `TTKZ`                |
//! | 4      | u16   | version = 1                 |
//! | 6      | u32×5 | B, F, H, W, C               |
//! | 26     | u32   | anchor                      |
//! | 30     | u32   | P (preserved source tokens) |
//! | 34     | f32   | threshold                   |
//! | 38     | u32   | radius                      |
//!
//! followed by `N+P` position triples `(u32 k, u32 y, u32 x)`, `F·N` u32 dst
//! entries, the `F·N` keep mask packed LSB-first into `ceil(F·N/8)` bytes
//! (padding bits zero), and `B·(N+P)·C` f32 tokens.

mod stats;
mod ttkz;
mod ttok;

pub use stats::{DecodeBlock, StatsJson, STATS_SCHEMA};
pub use ttkz::{decode_ttkz, encode_ttkz, TtkzFile, TTKZ_HEADER_LEN, TTKZ_MAGIC};
pub use ttok::{decode_ttok, encode_ttok, TTOK_HEADER_LEN, TTOK_MAGIC};

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::model::{FusionInvariantError, TokenGrid};

pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("file ends inside header field `{field}`")]
    Truncated { field: &'static str },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },

    #[error("header field `{field}`: {reason}")]
    BadField { field: &'static str, reason: String },

    #[error("section `{section}` expects {expected} bytes, file has {actual}")]
    Length {
        section: &'static str,
        expected: u64,
        actual: u64,
    },

    #[error("payload: {0}")]
    Grid(#[from] crate::Error),

    #[error(transparent)]
    Result(#[from] FusionInvariantError),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl FormatError {
    fn field(field: &'static str, reason: impl Into<String>) -> Self {
        FormatError::BadField {
            field,
            reason: reason.into(),
        }
    }
}

/// Little-endian cursor over a byte slice that names the field it fails on.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, len: usize, field: &'static str) -> Result<&'a [u8], FormatError> {
        if self.buf.len() - self.pos < len {
            return Err(FormatError::Truncated { field });
        }
        let out = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    pub(crate) fn magic(&mut self, expected: &[u8; 4]) -> Result<(), FormatError> {
        let found = self.take(4, "magic")?;
        if found != expected {
            return Err(FormatError::BadMagic {
                expected: String::from_utf8_lossy(expected).into_owned(),
                found: String::from_utf8_lossy(found).into_owned(),
            });
        }
        Ok(())
    }

    pub(crate) fn u16(&mut self, field: &'static str) -> Result<u16, FormatError> {
        let b = self.take(2, field)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    pub(crate) fn u32(&mut self, field: &'static str) -> Result<u32, FormatError> {
        let b = self.take(4, field)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub(crate) fn f32(&mut self, field: &'static str) -> Result<f32, FormatError> {
        Ok(f32::from_bits(self.u32(field)?))
    }

    pub(crate) fn version(&mut self) -> Result<(), FormatError> {
        let v = self.u16("version")?;
        if v != FORMAT_VERSION {
            return Err(FormatError::field(
                "version",
                format!("unsupported version {v}"),
            ));
        }
        Ok(())
    }

    /// Reads a strictly positive dimension.
    pub(crate) fn dim(&mut self, field: &'static str) -> Result<usize, FormatError> {
        let v = self.u32(field)?;
        if v == 0 {
            return Err(FormatError::field(field, "must be at least 1"));
        }
        Ok(v as usize)
    }

    pub(crate) fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    /// Takes exactly `len` bytes for a named section.
    pub(crate) fn section(
        &mut self,
        len: u64,
        section: &'static str,
    ) -> Result<&'a [u8], FormatError> {
        let actual = self.remaining() as u64;
        if actual < len {
            return Err(FormatError::Length {
                section,
                expected: len,
                actual,
            });
        }
        self.take(len as usize, section)
    }

    pub(crate) fn finish(&self, section: &'static str, expected: u64) -> Result<(), FormatError> {
        if self.remaining() != 0 {
            return Err(FormatError::Length {
                section,
                expected,
                actual: expected + self.remaining() as u64,
            });
        }
        Ok(())
    }
}

pub(crate) fn f32s_from_le(bytes: &[u8]) -> Vec<f32> {
    bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect()
}

pub(crate) fn u32s_from_le(bytes: &[u8]) -> Vec<u32> {
    bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect()
}

/// `count · size` as a byte length, failing on overflow.
pub(crate) fn byte_len(
    parts: &[usize],
    size: usize,
    section: &'static str,
) -> Result<u64, FormatError> {
    parts
        .iter()
        .try_fold(size as u64, |acc, &p| acc.checked_mul(p as u64))
        .ok_or_else(|| FormatError::field(section, "size overflows"))
}

pub fn read_ttok(path: impl AsRef<Path>) -> Result<TokenGrid, FormatError> {
    decode_ttok(&std::fs::read(path)?)
}

pub fn read_ttkz(path: impl AsRef<Path>) -> Result<TtkzFile, FormatError> {
    decode_ttkz(&std::fs::read(path)?)
}
