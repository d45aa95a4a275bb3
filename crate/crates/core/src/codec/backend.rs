//! Lossless compressor backends and the registry that resolves them by id.

use std::io::{Read, Write};
use std::ops::RangeInclusive;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{CodecError, EncodedBlob};

pub const DEFAULT_BACKEND_ID: &str = "deflate";

/// A compressor choice: registry id plus level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompressorBackend {
    pub id: String,
    pub level: u32,
}

impl CompressorBackend {
    pub fn new(id: impl Into<String>, level: u32) -> Self {
        Self { id: id.into(), level }
    }

    /// The backend's own default level, or an error if `id` is unregistered.
    pub fn with_default_level(id: &str) -> Result<Self, CodecError> {
        let info = Registry::global().info(id)?;
        Ok(Self::new(id, info.default_level))
    }

    /// `id-level`, recorded in every report.
    pub fn label(&self) -> String {
        format!("{}-{}", self.id, self.level)
    }
}

impl Default for CompressorBackend {
    /// Raw DEFLATE at maximum compression.
    fn default() -> Self {
        Self::new(DEFAULT_BACKEND_ID, 9)
    }
}

pub trait Compressor: Send + Sync {
    fn compress(&self, input: &[u8]) -> Result<Vec<u8>, CodecError>;

    fn decompress(&self, input: &[u8]) -> Result<Vec<u8>, CodecError>;

    /// Largest output `compress` can produce for `raw_len` input bytes.
    fn expansion_bound(&self, raw_len: u64) -> u64;
}

/// Raw DEFLATE stream (no zlib/gzip container, so no timestamps or names).
struct Deflate {
    level: u32,
    empty_len: u64,
}

impl Deflate {
    fn new(level: u32) -> Self {
        let mut d = Self { level, empty_len: 0 };
        d.empty_len = d.compress(&[]).map_or(0, |v| v.len() as u64);
        d
    }
}

/// Largest payload of one stored DEFLATE block.
const STORED_BLOCK: usize = 65_535;

/// `input` as a sequence of stored (uncompressed) DEFLATE blocks.
fn stored_stream(input: &[u8]) -> Vec<u8> {
    let blocks = input.len().div_ceil(STORED_BLOCK).max(1);
    let mut out = Vec::with_capacity(input.len() + blocks * 5);
    let mut chunks = input.chunks(STORED_BLOCK).peekable();
    if chunks.peek().is_none() {
        out.extend_from_slice(&[1, 0, 0, 0xff, 0xff]);
        return out;
    }
    while let Some(chunk) = chunks.next() {
        let len = chunk.len() as u16;
        out.push(u8::from(chunks.peek().is_none()));
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(&(!len).to_le_bytes());
        out.extend_from_slice(chunk);
    }
    out
}

impl Compressor for Deflate {
    /// miniz_oxide only falls back to stored blocks for ~31 KiB chunks (and
    /// never at level 1), so the stream is replaced by a plain stored encoding
    /// whenever that is shorter.
    fn compress(&self, input: &[u8]) -> Result<Vec<u8>, CodecError> {
        let mut enc = flate2::write::DeflateEncoder::new(
            Vec::with_capacity(input.len() / 2 + 64),
            flate2::Compression::new(self.level),
        );
        let packed = enc
            .write_all(input)
            .and_then(|_| enc.finish())
            .map_err(|e| CodecError::Backend {
                backend: "deflate".into(),
                message: e.to_string(),
            })?;
        let stored_len = input.len() + input.len().div_ceil(STORED_BLOCK).max(1) * 5;
        if packed.len() > stored_len {
            return Ok(stored_stream(input));
        }
        Ok(packed)
    }

    fn decompress(&self, input: &[u8]) -> Result<Vec<u8>, CodecError> {
        let mut out = Vec::new();
        flate2::read::DeflateDecoder::new(input)
            .read_to_end(&mut out)
            .map_err(|e| CodecError::Backend {
                backend: "deflate".into(),
                message: e.to_string(),
            })?;
        Ok(out)
    }

    /// Stored-block worst case: 5 bytes of framing per 65535-byte block on
    /// top of the empty-stream output.
    fn expansion_bound(&self, raw_len: u64) -> u64 {
        raw_len + self.empty_len + raw_len.div_ceil(65535) * 5
    }
}

struct Bzip2 {
    level: u32,
}

impl Compressor for Bzip2 {
    fn compress(&self, input: &[u8]) -> Result<Vec<u8>, CodecError> {
        let mut enc = bzip2::write::BzEncoder::new(
            Vec::with_capacity(input.len() / 2 + 64),
            bzip2::Compression::new(self.level),
        );
        enc.write_all(input)
            .and_then(|_| enc.finish())
            .map_err(|e| CodecError::Backend {
                backend: "bzip2".into(),
                message: e.to_string(),
            })
    }

    fn decompress(&self, input: &[u8]) -> Result<Vec<u8>, CodecError> {
        let mut out = Vec::new();
        bzip2::read::BzDecoder::new(input)
            .read_to_end(&mut out)
            .map_err(|e| CodecError::Backend {
                backend: "bzip2".into(),
                message: e.to_string(),
            })?;
        Ok(out)
    }

    /// libbzip2's documented worst case: 1% plus 600 bytes.
    fn expansion_bound(&self, raw_len: u64) -> u64 {
        raw_len + raw_len.div_ceil(100) + 600
    }
}

/// `.xz` stream without an integrity check. The LZMA2 dictionary at level 9
/// is 64 MiB, so repeats far apart in the input are still found.
struct Xz {
    level: u32,
}

impl Xz {
    fn backend_err(e: impl std::fmt::Display) -> CodecError {
        CodecError::Backend {
            backend: "xz".into(),
            message: e.to_string(),
        }
    }
}

impl Compressor for Xz {
    fn compress(&self, input: &[u8]) -> Result<Vec<u8>, CodecError> {
        let stream =
            xz2::stream::Stream::new_easy_encoder(self.level, xz2::stream::Check::None).map_err(Self::backend_err)?;
        let mut enc = xz2::write::XzEncoder::new_stream(Vec::with_capacity(input.len() / 2 + 64), stream);
        enc.write_all(input)
            .and_then(|_| enc.finish())
            .map_err(Self::backend_err)
    }

    fn decompress(&self, input: &[u8]) -> Result<Vec<u8>, CodecError> {
        let mut out = Vec::new();
        xz2::read::XzDecoder::new(input)
            .read_to_end(&mut out)
            .map_err(Self::backend_err)?;
        Ok(out)
    }

    /// Uncompressed LZMA2 chunks cost 3 bytes per 64 KiB, plus stream and
    /// block framing.
    fn expansion_bound(&self, raw_len: u64) -> u64 {
        raw_len + raw_len.div_ceil(65_536) * 3 + 64
    }
}

/// Registry entry: how to build a backend for a given level.
#[derive(Clone)]
pub struct BackendInfo {
    pub id: &'static str,
    pub levels: RangeInclusive<u32>,
    pub default_level: u32,
    pub build: fn(u32) -> Box<dyn Compressor>,
}

impl std::fmt::Debug for BackendInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BackendInfo")
            .field("id", &self.id)
            .field("levels", &self.levels)
            .field("default_level", &self.default_level)
            .finish()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    entries: Vec<BackendInfo>,
}

impl Registry {
    pub fn with_defaults() -> Self {
        let mut r = Self::default();
        r.register(BackendInfo {
            id: "deflate",
            levels: 0..=9,
            default_level: 9,
            build: |level| Box::new(Deflate::new(level)),
        });
        r.register(BackendInfo {
            id: "bzip2",
            levels: 1..=9,
            default_level: 9,
            build: |level| Box::new(Bzip2 { level }),
        });
        r.register(BackendInfo {
            id: "xz",
            levels: 0..=9,
            default_level: 9,
            build: |level| Box::new(Xz { level }),
        });
        r
    }

    /// The process-wide registry, built on first use and read-only afterwards.
    pub fn global() -> &'static Registry {
        static GLOBAL: OnceLock<Registry> = OnceLock::new();
        GLOBAL.get_or_init(Registry::with_defaults)
    }

    /// Adds or replaces the entry for `info.id`.
    pub fn register(&mut self, info: BackendInfo) {
        self.entries.retain(|e| e.id != info.id);
        self.entries.push(info);
    }

    pub fn ids(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|e| e.id)
    }

    pub fn info(&self, id: &str) -> Result<&BackendInfo, CodecError> {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| CodecError::UnknownBackend(id.to_string()))
    }

    pub fn resolve(&self, backend: &CompressorBackend) -> Result<Box<dyn Compressor>, CodecError> {
        let info = self.info(&backend.id)?;
        if !info.levels.contains(&backend.level) {
            return Err(CodecError::InvalidLevel {
                id: backend.id.clone(),
                level: backend.level,
            });
        }
        Ok((info.build)(backend.level))
    }
}

/// Compresses the whole payload (header included) with the named backend.
pub fn compress(blob: &EncodedBlob, backend: &CompressorBackend) -> Result<Vec<u8>, CodecError> {
    Registry::global().resolve(backend)?.compress(blob.payload())
}

pub fn decompress(bytes: &[u8], backend: &CompressorBackend) -> Result<EncodedBlob, CodecError> {
    let payload = Registry::global().resolve(backend)?.decompress(bytes)?;
    EncodedBlob::from_payload(payload)
}
