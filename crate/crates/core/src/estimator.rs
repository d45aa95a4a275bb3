//! Compression-based complexity estimates.
//!
//! `k_hat` is the compressed length of the self-delimited blob, `raw_len` the
//! length of the blob itself. Both are in bytes. The estimate is an upper-bound
//! proxy, so the classical inequalities (subadditivity of joint complexity, the
//! computable-map bound) only hold up to compressor framing; [`BoundCheck`]
//! records how far each check was from failing instead of asserting.

use serde::{Deserialize, Serialize};

use crate::codec::{self, CodecError, CompressorBackend, EncodedBlob, Registry, TupleDataset};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub k_hat: u64,
    pub raw_len: u64,
    pub backend_id: String,
}

impl ComplexityEstimate {
    /// Compressed bytes per raw byte.
    pub fn density(&self) -> f64 {
        self.k_hat as f64 / self.raw_len as f64
    }
}

pub fn estimate(d: &TupleDataset, backend: &CompressorBackend) -> Result<ComplexityEstimate, CodecError> {
    estimate_blob(&codec::encode(d), backend)
}

pub fn estimate_blob(blob: &EncodedBlob, backend: &CompressorBackend) -> Result<ComplexityEstimate, CodecError> {
    let packed = codec::compress(blob, backend)?;
    Ok(ComplexityEstimate {
        k_hat: packed.len() as u64,
        raw_len: blob.declared_len(),
        backend_id: backend.label(),
    })
}

/// Estimates an arbitrary byte string after prefixing the length header.
pub fn estimate_bytes(bytes: &[u8], backend: &CompressorBackend) -> Result<ComplexityEstimate, CodecError> {
    estimate_blob(&EncodedBlob::delimit(bytes), backend)
}

/// Joint estimate: the two self-delimited blobs back to back. Each header
/// tells the reader where its dataset ends.
pub fn estimate_joint(
    d1: &TupleDataset,
    d2: &TupleDataset,
    backend: &CompressorBackend,
) -> Result<ComplexityEstimate, CodecError> {
    let (a, b) = (codec::encode(d1), codec::encode(d2));
    let mut joint = Vec::with_capacity(a.payload().len() + b.payload().len());
    joint.extend_from_slice(a.payload());
    joint.extend_from_slice(b.payload());
    let packed = codec::Registry::global().resolve(backend)?.compress(&joint)?;
    Ok(ComplexityEstimate {
        k_hat: packed.len() as u64,
        raw_len: joint.len() as u64,
        backend_id: backend.label(),
    })
}

/// Allowance for the logarithmic and constant terms: `64 + ceil(log2(raw_len))` bytes.
pub fn slack(raw_len: u64) -> u64 {
    64 + ceil_log2(raw_len)
}

pub(crate) fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        u64::from(64 - (x - 1).leading_zeros())
    }
}

/// Worst-case `k_hat` the backend can produce for a blob of `raw_len` bytes.
pub fn expansion_bound(raw_len: u64, backend: &CompressorBackend) -> Result<u64, CodecError> {
    Ok(Registry::global().resolve(backend)?.expansion_bound(raw_len))
}

/// Outcome of a soft inequality `lhs <= rhs + slack`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: u64,
    pub rhs: u64,
    pub slack: u64,
    pub holds: bool,
}

impl BoundCheck {
    pub fn new(lhs: u64, rhs: u64, slack: u64) -> Self {
        Self {
            lhs,
            rhs,
            slack,
            holds: lhs <= rhs + slack,
        }
    }

    /// `rhs + slack - lhs`; negative when violated.
    pub fn margin(&self) -> i64 {
        (self.rhs + self.slack) as i64 - self.lhs as i64
    }
}

/// Joint estimate against the sum of the parts, slack taken from the joint blob size.
pub fn check_subadditivity(
    d1: &TupleDataset,
    d2: &TupleDataset,
    backend: &CompressorBackend,
) -> Result<BoundCheck, CodecError> {
    let joint = estimate_joint(d1, d2, backend)?;
    let k1 = estimate(d1, backend)?;
    let k2 = estimate(d2, backend)?;
    Ok(BoundCheck::new(joint.k_hat, k1.k_hat + k2.k_hat, slack(joint.raw_len)))
}

/// Image of a computable map against its source: `k_hat(f(x)) <= k_hat(x) + slack`.
pub fn check_map_bound(source: &ComplexityEstimate, image: &ComplexityEstimate) -> BoundCheck {
    BoundCheck::new(image.k_hat, source.k_hat, slack(source.raw_len))
}
