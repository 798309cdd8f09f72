//! Unsigned LEB128 varints and zigzag-mapped signed values.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("input truncated")]
    Truncated,
    #[error("bad magic byte {found:#04x}, expected {expected:#04x}")]
    BadMagic { expected: u8, found: u8 },
    #[error("unsupported version {0}")]
    BadVersion(u8),
    #[error("{0} trailing bytes after record")]
    Trailing(usize),
    #[error("varint overflows 64 bits")]
    Overflow,
    #[error("invalid {what} value {value}")]
    InvalidTag { what: &'static str, value: u64 },
    #[error("non-canonical encoding: {0}")]
    NonCanonical(&'static str),
}

pub fn put_u64(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

pub fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

pub fn unzigzag(v: u64) -> i64 {
    ((v >> 1) as i64) ^ -((v & 1) as i64)
}

pub fn put_i64(out: &mut Vec<u8>, v: i64) {
    put_u64(out, zigzag(v));
}

pub fn encoded_len(v: u64) -> usize {
    (64 - (v | 1).leading_zeros() as usize).div_ceil(7)
}

/// Cursor over a byte slice.
#[derive(Debug)]
pub struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    pub fn byte(&mut self) -> Result<u8, DecodeError> {
        let b = *self.bytes.get(self.pos).ok_or(DecodeError::Truncated)?;
        self.pos += 1;
        Ok(b)
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.remaining() < n {
            return Err(DecodeError::Truncated);
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn expect_header(&mut self, magic: u8, version: u8) -> Result<(), DecodeError> {
        let found = self.byte()?;
        if found != magic {
            return Err(DecodeError::BadMagic {
                expected: magic,
                found,
            });
        }
        let v = self.byte()?;
        if v != version {
            return Err(DecodeError::BadVersion(v));
        }
        Ok(())
    }

    pub fn u64(&mut self) -> Result<u64, DecodeError> {
        let mut v: u64 = 0;
        let mut shift = 0u32;
        loop {
            let b = self.byte()?;
            let group = (b & 0x7f) as u64;
            if shift == 63 && group > 1 {
                return Err(DecodeError::Overflow);
            }
            v |= group << shift;
            if b & 0x80 == 0 {
                if group == 0 && shift > 0 {
                    return Err(DecodeError::NonCanonical("varint has a zero final group"));
                }
                return Ok(v);
            }
            shift += 7;
            if shift > 63 {
                return Err(DecodeError::Overflow);
            }
        }
    }

    pub fn i64(&mut self) -> Result<i64, DecodeError> {
        self.u64().map(unzigzag)
    }

    /// A length or count that must fit in memory; capped by the bytes left
    /// so corrupt input cannot trigger a huge allocation.
    pub fn count(&mut self, min_bytes_each: usize) -> Result<usize, DecodeError> {
        let n = self.u64()?;
        let max = self.remaining() / min_bytes_each.max(1);
        if n > max as u64 {
            return Err(DecodeError::Truncated);
        }
        Ok(n as usize)
    }

    pub fn finish(&self) -> Result<(), DecodeError> {
        match self.remaining() {
            0 => Ok(()),
            n => Err(DecodeError::Trailing(n)),
        }
    }
}
