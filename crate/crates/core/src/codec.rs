//! Tagged-section container used by key, proof, package and state files.
//!
//! ```text
//! magic    4 bytes, file kind
//! version  u8 = 1
//! profile  u8, curve profile byte
//! repeated:
//!   tag    u8   (datatype tags 1..=8, extension tags >= 0x10)
//!   len    u32 LE
//!   body   len bytes
//! ```
//!
//! Sections appear in a fixed order per file kind and each tag at most once.

use crate::field::{DTypeTag, PrimeField};
use crate::pairing::{CurveGroup, GroupError};

pub const CONTAINER_VERSION: u8 = 1;

/// Extension tags beyond the eight datatype tags.
pub mod ext {
    pub const PUBLIC_INPUTS: u8 = 0x10;
    pub const SIGNATURE: u8 = 0x11;
    pub const SIG_KEY: u8 = 0x12;
    pub const PROVING_KEY: u8 = 0x13;
    pub const DESCRIPTOR: u8 = 0x14;
    pub const SECRET_KEY: u8 = 0x15;
    pub const REGISTRY_ENTRY: u8 = 0x16;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("bad magic, expected {expected:?}")]
    Magic { expected: String },
    #[error("unsupported container version {0}")]
    Version(u8),
    #[error("profile byte {got:#04x}, expected {expected:#04x}")]
    Profile { expected: u8, got: u8 },
    #[error("truncated input")]
    Truncated,
    #[error("trailing bytes after the last field")]
    Trailing,
    #[error("missing section {0:#04x}")]
    MissingSection(u8),
    #[error("section {0:#04x} appears twice")]
    DuplicateSection(u8),
    #[error("section order violated at tag {0:#04x}")]
    Order(u8),
    #[error("field element out of range")]
    FieldRange,
    #[error("invalid group element: {0}")]
    Group(#[from] GroupError),
    #[error("{0}")]
    Invalid(String),
}

pub fn tag(t: DTypeTag) -> u8 {
    t as u8
}

/// Builds a container.
pub struct ContainerWriter {
    buf: Vec<u8>,
}

impl ContainerWriter {
    pub fn new(magic: &[u8; 4], profile: u8) -> Self {
        let mut buf = magic.to_vec();
        buf.push(CONTAINER_VERSION);
        buf.push(profile);
        ContainerWriter { buf }
    }

    pub fn section(mut self, tag: u8, body: &[u8]) -> Self {
        self.buf.push(tag);
        self.buf.extend((body.len() as u32).to_le_bytes());
        self.buf.extend_from_slice(body);
        self
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

/// A parsed container.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub profile: u8,
    sections: Vec<(u8, Vec<u8>)>,
}

impl Container {
    pub fn parse(bytes: &[u8], magic: &[u8; 4], profile: u8) -> Result<Self, CodecError> {
        let mut r = ByteReader::new(bytes);
        if r.take(4)? != magic {
            return Err(CodecError::Magic {
                expected: String::from_utf8_lossy(magic).into_owned(),
            });
        }
        let version = r.u8()?;
        if version != CONTAINER_VERSION {
            return Err(CodecError::Version(version));
        }
        let got = r.u8()?;
        if got != profile {
            return Err(CodecError::Profile { expected: profile, got });
        }
        let mut sections: Vec<(u8, Vec<u8>)> = Vec::new();
        while !r.is_empty() {
            let t = r.u8()?;
            let len = r.u32()? as usize;
            let body = r.take(len)?.to_vec();
            if sections.iter().any(|(s, _)| *s == t) {
                return Err(CodecError::DuplicateSection(t));
            }
            sections.push((t, body));
        }
        Ok(Container { profile, sections })
    }

    pub fn get(&self, tag: u8) -> Result<&[u8], CodecError> {
        self.sections
            .iter()
            .find(|(t, _)| *t == tag)
            .map(|(_, b)| b.as_slice())
            .ok_or(CodecError::MissingSection(tag))
    }

    pub fn get_opt(&self, tag: u8) -> Option<&[u8]> {
        self.get(tag).ok()
    }

    pub fn tags(&self) -> Vec<u8> {
        self.sections.iter().map(|(t, _)| *t).collect()
    }

    /// Requires the sections to be exactly `order`.
    pub fn expect_order(&self, order: &[u8]) -> Result<(), CodecError> {
        for (i, want) in order.iter().enumerate() {
            match self.sections.get(i) {
                Some((t, _)) if t == want => {}
                Some((t, _)) => return Err(CodecError::Order(*t)),
                None => return Err(CodecError::MissingSection(*want)),
            }
        }
        if let Some((t, _)) = self.sections.get(order.len()) {
            return Err(CodecError::Order(*t));
        }
        Ok(())
    }
}

/// Cursor over a byte slice with typed readers.
pub struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        ByteReader { buf, pos: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.pos == self.buf.len()
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.buf.len() - self.pos < n {
            return Err(CodecError::Truncated);
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub fn array<const N: usize>(&mut self) -> Result<[u8; N], CodecError> {
        Ok(self.take(N)?.try_into().expect("N bytes"))
    }

    pub fn field<F: PrimeField>(&mut self) -> Result<F, CodecError> {
        F::from_le_bytes_canonical(self.take(F::BYTES)?).ok_or(CodecError::FieldRange)
    }

    pub fn point<G: CurveGroup>(&mut self) -> Result<G, CodecError> {
        Ok(G::from_bytes(self.take(G::ENCODED_LEN)?)?)
    }

    /// A `u32` count followed by that many points.
    pub fn points<G: CurveGroup>(&mut self) -> Result<Vec<G>, CodecError> {
        let n = self.u32()? as usize;
        if n.saturating_mul(G::ENCODED_LEN) > self.buf.len() - self.pos {
            return Err(CodecError::Truncated);
        }
        (0..n).map(|_| self.point()).collect()
    }

    /// A `u32` count followed by that many field elements.
    pub fn fields<F: PrimeField>(&mut self) -> Result<Vec<F>, CodecError> {
        let n = self.u32()? as usize;
        if n.saturating_mul(F::BYTES) > self.buf.len() - self.pos {
            return Err(CodecError::Truncated);
        }
        (0..n).map(|_| self.field()).collect()
    }

    pub fn finish(&self) -> Result<(), CodecError> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(CodecError::Trailing)
        }
    }
}

pub fn put_points<G: CurveGroup>(out: &mut Vec<u8>, pts: &[G]) {
    out.extend((pts.len() as u32).to_le_bytes());
    for p in pts {
        out.extend(p.to_bytes());
    }
}

pub fn put_fields<F: PrimeField>(out: &mut Vec<u8>, xs: &[F]) {
    out.extend((xs.len() as u32).to_le_bytes());
    for x in xs {
        out.extend(x.to_le_bytes());
    }
}
