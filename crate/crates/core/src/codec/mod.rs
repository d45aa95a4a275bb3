//! Canonical serialization of tuple datasets.
//!
//! A dataset is rendered as text, one byte per character:
//!
//! ```text
//! ((v11,v12,...,v1n),(v21,...,v2n),...,(vm1,...,vmn))
//! ```
//!
//! with every scalar written as a fixed-point decimal with exactly six
//! fractional digits. The body is prefixed with its length as an 8-byte
//! big-endian integer, so every blob carries its own length.

mod backend;
mod ingest;

pub use backend::{compress, decompress, BackendInfo, Compressor, CompressorBackend, Registry, DEFAULT_BACKEND_ID};
pub use ingest::{parse_csv, parse_json, read_dataset};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Micro-units per unit.
pub const SCALE: i64 = 1_000_000;

/// Largest representable magnitude, in micro-units (10^9 units).
pub const MAX_ABS_MICROS: i64 = 1_000_000_000 * SCALE;

/// Width of the big-endian length header in front of every body.
pub const HEADER_LEN: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("value {value} at row {row}, column {col} is outside [-1e9, 1e9]")]
    OutOfRange { row: usize, col: usize, value: String },
    #[error("value {0} is outside [-1e9, 1e9]")]
    ScalarOutOfRange(String),
    #[error("cannot parse {text:?} as a fixed-point decimal: {reason}")]
    Scalar { text: String, reason: &'static str },
    #[error("row {row} has {found} columns, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("a dataset needs at least one column")]
    NoColumns,
    #[error("line {line}: {message}")]
    Input { line: usize, message: String },
    #[error("malformed blob: {0}")]
    Malformed(String),
    #[error("unknown compressor backend {0:?}")]
    UnknownBackend(String),
    #[error("backend {id:?} does not accept level {level}")]
    InvalidLevel { id: String, level: u32 },
    #[error("{backend} failed: {message}")]
    Backend { backend: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Fixed-point decimal with six fractional digits, stored as signed micro-units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct QuantizedScalar(i64);

impl QuantizedScalar {
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(SCALE);

    pub fn from_micros(micros: i64) -> Result<Self, CodecError> {
        if micros.abs() > MAX_ABS_MICROS {
            return Err(CodecError::ScalarOutOfRange(format!("{micros}e-6")));
        }
        Ok(Self(micros))
    }

    /// Rounds to the nearest micro-unit, ties away from zero.
    pub fn from_f64(value: f64) -> Result<Self, CodecError> {
        let scaled = (value * SCALE as f64).round();
        if !scaled.is_finite() || scaled.abs() > MAX_ABS_MICROS as f64 {
            return Err(CodecError::ScalarOutOfRange(value.to_string()));
        }
        Ok(Self(scaled as i64))
    }

    pub fn from_int(value: i64) -> Result<Self, CodecError> {
        value
            .checked_mul(SCALE)
            .ok_or_else(|| CodecError::ScalarOutOfRange(value.to_string()))
            .and_then(Self::from_micros)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    fn write_to(self, out: &mut Vec<u8>) {
        use std::io::Write;
        let abs = self.0.unsigned_abs();
        if self.0 < 0 {
            out.push(b'-');
        }
        let scale = SCALE as u64;
        // Writing into a Vec cannot fail.
        let _ = write!(out, "{}.{:06}", abs / scale, abs % scale);
    }
}

impl fmt::Display for QuantizedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = Vec::with_capacity(20);
        self.write_to(&mut buf);
        // Only ASCII is ever written.
        f.write_str(std::str::from_utf8(&buf).map_err(|_| fmt::Error)?)
    }
}

impl FromStr for QuantizedScalar {
    type Err = CodecError;

    /// Accepts `[+-]?digits[.digits]` with at most six fractional digits.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| CodecError::Scalar {
            text: s.to_string(),
            reason,
        };
        let (negative, rest) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            Some(_) => (false, s),
            None => return Err(err("empty")),
        };
        let (int_part, frac_part) = match rest.split_once('.') {
            Some((i, f)) => (i, f),
            None => (rest, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err("no digits"));
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("not a decimal number"));
        }
        if frac_part.len() > 6 {
            return Err(err("more than six fractional digits"));
        }
        let int_part = int_part.trim_start_matches('0');
        if int_part.len() > 10 {
            return Err(err("outside [-1e9, 1e9]"));
        }
        let int: i64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| err("not a decimal number"))?
        };
        let mut frac: i64 = 0;
        for (i, b) in frac_part.bytes().enumerate() {
            frac += i64::from(b - b'0') * 10i64.pow(5 - i as u32);
        }
        let magnitude = int
            .checked_mul(SCALE)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(|| err("outside [-1e9, 1e9]"))?;
        Self::from_micros(if negative { -magnitude } else { magnitude }).map_err(|_| err("outside [-1e9, 1e9]"))
    }
}

impl serde::Serialize for QuantizedScalar {
    /// As a JSON number; six-digit decimals survive the f64 round trip.
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

/// Ordered m x n table of scalars; row order is part of the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TupleDataset {
    n_cols: usize,
    values: Vec<QuantizedScalar>,
}

impl TupleDataset {
    pub fn empty(n_cols: usize) -> Result<Self, CodecError> {
        if n_cols == 0 {
            return Err(CodecError::NoColumns);
        }
        Ok(Self {
            n_cols,
            values: Vec::new(),
        })
    }

    pub fn with_capacity(n_cols: usize, m_rows: usize) -> Result<Self, CodecError> {
        let mut d = Self::empty(n_cols)?;
        d.values.reserve(n_cols * m_rows);
        Ok(d)
    }

    pub fn from_rows<R>(n_cols: usize, rows: impl IntoIterator<Item = R>) -> Result<Self, CodecError>
    where
        R: AsRef<[QuantizedScalar]>,
    {
        let mut d = Self::empty(n_cols)?;
        for row in rows {
            d.push_row(row.as_ref())?;
        }
        Ok(d)
    }

    /// Builds a dataset from floating-point rows, rounding each value to six
    /// fractional digits. Out-of-range values are reported with their
    /// zero-based row and column.
    pub fn from_f64_rows<R>(n_cols: usize, rows: impl IntoIterator<Item = R>) -> Result<Self, CodecError>
    where
        R: AsRef<[f64]>,
    {
        let mut d = Self::empty(n_cols)?;
        for (r, row) in rows.into_iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(CodecError::Ragged {
                    row: r,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                let q = QuantizedScalar::from_f64(v).map_err(|_| CodecError::OutOfRange {
                    row: r,
                    col: c,
                    value: v.to_string(),
                })?;
                d.values.push(q);
            }
        }
        Ok(d)
    }

    pub fn push_row(&mut self, row: &[QuantizedScalar]) -> Result<(), CodecError> {
        if row.len() != self.n_cols {
            return Err(CodecError::Ragged {
                row: self.m_rows(),
                expected: self.n_cols,
                found: row.len(),
            });
        }
        self.values.extend_from_slice(row);
        Ok(())
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn m_rows(&self) -> usize {
        self.values.len() / self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> &[QuantizedScalar] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, QuantizedScalar> {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = QuantizedScalar> + '_ {
        self.rows().map(move |r| r[c])
    }
}

/// Self-delimited byte serialization: 8-byte big-endian body length, then the body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncodedBlob {
    payload: Vec<u8>,
}

impl EncodedBlob {
    /// Wraps an arbitrary body with the length header.
    pub fn delimit(body: &[u8]) -> Self {
        let mut payload = Vec::with_capacity(HEADER_LEN + body.len());
        payload.extend_from_slice(&(body.len() as u64).to_be_bytes());
        payload.extend_from_slice(body);
        Self { payload }
    }

    /// Validates that `payload` is a header followed by exactly the declared body.
    pub fn from_payload(payload: Vec<u8>) -> Result<Self, CodecError> {
        let blob = Self { payload };
        let body_len = blob.header_body_len()?;
        if body_len != (blob.payload.len() - HEADER_LEN) as u64 {
            return Err(CodecError::Malformed(format!(
                "header declares {body_len} body bytes, found {}",
                blob.payload.len() - HEADER_LEN
            )));
        }
        Ok(blob)
    }

    fn header_body_len(&self) -> Result<u64, CodecError> {
        let header: [u8; HEADER_LEN] = self
            .payload
            .get(..HEADER_LEN)
            .and_then(|h| h.try_into().ok())
            .ok_or_else(|| CodecError::Malformed("shorter than the length header".into()))?;
        Ok(u64::from_be_bytes(header))
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn into_payload(self) -> Vec<u8> {
        self.payload
    }

    /// Byte length of the whole payload, header included.
    pub fn declared_len(&self) -> u64 {
        self.payload.len() as u64
    }

    pub fn body(&self) -> &[u8] {
        &self.payload[HEADER_LEN..]
    }

    pub fn body_len(&self) -> u64 {
        (self.payload.len() - HEADER_LEN) as u64
    }
}

/// Renders `d` into its canonical self-delimited form.
pub fn encode(d: &TupleDataset) -> EncodedBlob {
    // Typical scalars in [-1, 1] take 9 bytes plus a separator.
    let mut payload = Vec::with_capacity(HEADER_LEN + 2 + d.values.len() * 10 + d.m_rows() * 2);
    payload.extend_from_slice(&[0u8; HEADER_LEN]);
    payload.push(b'(');
    for (r, row) in d.rows().enumerate() {
        if r > 0 {
            payload.push(b',');
        }
        payload.push(b'(');
        for (c, v) in row.iter().enumerate() {
            if c > 0 {
                payload.push(b',');
            }
            v.write_to(&mut payload);
        }
        payload.push(b')');
    }
    payload.push(b')');
    let body_len = (payload.len() - HEADER_LEN) as u64;
    payload[..HEADER_LEN].copy_from_slice(&body_len.to_be_bytes());
    EncodedBlob { payload }
}

/// Parses a blob produced by [`encode`] back into rows.
///
/// The column count of an empty dataset is not recoverable from its blob,
/// so this returns rows; pair with [`TupleDataset::from_rows`].
pub fn decode(blob: &EncodedBlob) -> Result<Vec<Vec<QuantizedScalar>>, CodecError> {
    let blob = EncodedBlob::from_payload(blob.payload.clone())?;
    let body = std::str::from_utf8(blob.body()).map_err(|_| CodecError::Malformed("body is not ASCII".into()))?;
    let inner = body
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| CodecError::Malformed("body is not parenthesized".into()))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    let inner = inner
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| CodecError::Malformed("rows are not parenthesized".into()))?;
    inner
        .split("),(")
        .map(|row| row.split(',').map(str::parse).collect())
        .collect()
}
