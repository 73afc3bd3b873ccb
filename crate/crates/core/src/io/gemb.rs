//! GEMB: a small binary container for embedding and probability matrices.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic        4 bytes  "GEMB"
//! version      u16      1
//! kind         u8       0 = embeddings, 1 = probabilities
//! reserved     u8       0
//! n            u64      rows
//! d            u64      columns
//! backbone_id  u16 length + UTF-8 bytes
//! source_label u16 length + UTF-8 bytes
//! payload      n·d f32, row-major
//! checksum     u64      CRC-64/XZ of every preceding byte
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crc::{Crc, CRC_64_XZ};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::{EmbeddingSet, ProbabilitySet, SourceLabel};

pub const MAGIC: &[u8; 4] = b"GEMB";
pub const VERSION: u16 = 1;
const FIXED_HEADER: usize = 4 + 2 + 1 + 1 + 8 + 8;
const FOOTER: usize = 8;

static CRC64: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

pub fn crc64(bytes: &[u8]) -> u64 {
    CRC64.checksum(bytes)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("bad magic: not a GEMB file")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown kind {0}")]
    UnknownKind(u8),
    #[error("reserved byte is {0}, expected 0")]
    Reserved(u8),
    #[error("unexpected end of {0}")]
    UnexpectedEof(&'static str),
    #[error("{0} trailing bytes after checksum")]
    TrailingBytes(u64),
    #[error("checksum mismatch: stored {stored:016x}, computed {computed:016x}")]
    ChecksumMismatch { stored: u64, computed: u64 },
    #[error("{0} is not valid UTF-8")]
    InvalidUtf8(&'static str),
    #[error("{0} is longer than 65535 bytes")]
    StringTooLong(&'static str),
    #[error("value {value} at ({row},{col}) does not fit in single precision")]
    OutOfRange { row: usize, col: usize, value: f64 },
    #[error("declared shape {n}x{d} is too large")]
    ShapeOverflow { n: u64, d: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum GembKind {
    Embeddings = 0,
    Probabilities = 1,
}

/// Contents of a GEMB file.
#[derive(Debug, Clone, PartialEq)]
pub enum GembData {
    Embeddings(EmbeddingSet),
    Probabilities(ProbabilitySet),
}

impl GembData {
    pub fn kind(&self) -> GembKind {
        match self {
            GembData::Embeddings(_) => GembKind::Embeddings,
            GembData::Probabilities(_) => GembKind::Probabilities,
        }
    }

    pub fn backbone_id(&self) -> &str {
        match self {
            GembData::Embeddings(e) => e.backbone_id(),
            GembData::Probabilities(p) => p.backbone_id(),
        }
    }

    pub fn source_label(&self) -> &SourceLabel {
        match self {
            GembData::Embeddings(e) => e.source_label(),
            GembData::Probabilities(p) => p.source_label(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            GembData::Embeddings(e) => (e.n(), e.d()),
            GembData::Probabilities(p) => (p.n(), p.class_count()),
        }
    }

    fn matrix(&self) -> ndarray::ArrayView2<'_, f64> {
        match self {
            GembData::Embeddings(e) => e.data(),
            GembData::Probabilities(p) => p.probs(),
        }
    }
}

impl From<EmbeddingSet> for GembData {
    fn from(e: EmbeddingSet) -> Self {
        GembData::Embeddings(e)
    }
}

impl From<ProbabilitySet> for GembData {
    fn from(p: ProbabilitySet) -> Self {
        GembData::Probabilities(p)
    }
}

fn push_str(out: &mut Vec<u8>, s: &str, field: &'static str) -> Result<()> {
    let len = u16::try_from(s.len()).map_err(|_| FormatError::StringTooLong(field))?;
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(s.as_bytes());
    Ok(())
}

/// Serializes `data` to its exact on-disk bytes.
pub fn encode_gemb(data: &GembData) -> Result<Vec<u8>> {
    let (n, d) = data.shape();
    let backbone = data.backbone_id();
    let label = data.source_label().as_str();
    let mut out =
        Vec::with_capacity(FIXED_HEADER + 4 + backbone.len() + label.len() + n * d * 4 + FOOTER);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(data.kind() as u8);
    out.push(0);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&(d as u64).to_le_bytes());
    push_str(&mut out, backbone, "backbone_id")?;
    push_str(&mut out, label, "source_label")?;
    for ((row, col), &v) in data.matrix().indexed_iter() {
        if v.abs() > f32::MAX as f64 {
            return Err(FormatError::OutOfRange { row, col, value: v }.into());
        }
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    let checksum = crc64(&out);
    out.extend_from_slice(&checksum.to_le_bytes());
    Ok(out)
}

/// Writes `data` to `w`, returning the byte count.
pub fn write_gemb(data: &GembData, mut w: impl Write) -> Result<u64> {
    let bytes = encode_gemb(data)?;
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(bytes.len() as u64)
}

/// Writes `data` to `path` via a temporary sibling and an atomic rename.
pub fn write_gemb_file(data: &GembData, path: &Path) -> Result<u64> {
    let bytes = encode_gemb(data).map_err(|e| e.in_file(path))?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::from(e).in_file(path)
    })?;
    Ok(bytes.len() as u64)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize, what: &'static str) -> Result<&'a [u8], FormatError> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(FormatError::UnexpectedEof(what))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self, what: &'static str) -> Result<u8, FormatError> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &'static str) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn string(&mut self, what: &'static str) -> Result<String, FormatError> {
        let len = self.u16(what)? as usize;
        let raw = self.take(len, what)?;
        String::from_utf8(raw.to_vec()).map_err(|_| FormatError::InvalidUtf8(what))
    }
}

/// Parses and validates GEMB bytes.
pub fn decode_gemb(bytes: &[u8]) -> Result<GembData> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4, "header").map_err(|_| FormatError::BadMagic)? != MAGIC {
        return Err(FormatError::BadMagic.into());
    }
    let version = cur.u16("header")?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version).into());
    }
    let kind = match cur.u8("header")? {
        0 => GembKind::Embeddings,
        1 => GembKind::Probabilities,
        other => return Err(FormatError::UnknownKind(other).into()),
    };
    let reserved = cur.u8("header")?;
    if reserved != 0 {
        return Err(FormatError::Reserved(reserved).into());
    }
    let n = cur.u64("header")?;
    let d = cur.u64("header")?;
    let backbone_id = cur.string("backbone_id")?;
    let source_label = cur.string("source_label")?;

    let values = n
        .checked_mul(d)
        .and_then(|v| usize::try_from(v).ok())
        .filter(|v| v.checked_mul(4).is_some())
        .ok_or(FormatError::ShapeOverflow { n, d })?;
    let payload = cur.take(values * 4, "payload")?;
    let body_len = cur.pos;
    let stored = u64::from_le_bytes(cur.take(FOOTER, "checksum")?.try_into().unwrap());
    if cur.pos != bytes.len() {
        return Err(FormatError::TrailingBytes((bytes.len() - cur.pos) as u64).into());
    }
    let computed = crc64(&bytes[..body_len]);
    if stored != computed {
        return Err(FormatError::ChecksumMismatch { stored, computed }.into());
    }

    let (n, d) = (n as usize, d as usize);
    let matrix = Array2::from_shape_fn((n, d), |(i, j)| {
        let at = (i * d + j) * 4;
        f32::from_le_bytes(payload[at..at + 4].try_into().unwrap()) as f64
    });
    Ok(match kind {
        GembKind::Embeddings => {
            GembData::Embeddings(EmbeddingSet::new(matrix, backbone_id, source_label.as_str())?)
        }
        GembKind::Probabilities => GembData::Probabilities(ProbabilitySet::new(
            matrix,
            backbone_id,
            source_label.as_str(),
        )?),
    })
}

pub fn read_gemb(mut r: impl Read) -> Result<GembData> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode_gemb(&bytes)
}

/// Reads a GEMB file; errors name the path.
pub fn read_gemb_file(path: &Path) -> Result<GembData> {
    let bytes = fs::read(path).map_err(|e| Error::from(e).in_file(path))?;
    decode_gemb(&bytes).map_err(|e| e.in_file(path))
}
