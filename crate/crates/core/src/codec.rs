// SPDX-License-Identifier: Apache-2.0

//! Container format.
//!
//! A container is a fixed 36-byte header followed by a bit stream (MSB first
//! within each byte) of post-order tree events, one tree per segment:
//!
//! ```text
//! offset size field
//!      0    4 magic "GRC1"
//!      4    1 version (1)
//!      5    1 mode (0 plain, 1 freq, 2 lossy, 3 block)
//!      6    2 sigma (256)
//!      8    8 k
//!     16    4 eps in parts per million of the dictionary
//!     20    8 ell
//!     28    8 original length (0 = unknown)
//! ```
//! All integers little-endian. Events:
//!
//! * leaf: bit `0`, then the symbol in `w` bits, big-endian, where
//!   `w = max(1, ceil(lg(SIGMA + created)))` and `created` is the number of
//!   nonterminals created before the leaf;
//! * internal node: bit `1`;
//! * segment end: the `1` that would bring the count of open subtrees to
//!   zero (a virtual root).
//!
//! The stream is zero-padded to a byte after the last segment.

use std::io::{self, Read, Write};

use crate::code::{Code, SIGMA};
use crate::error::{Error, Result};
use crate::strategy::{Mode, StrategyConfig};

pub const MAGIC: [u8; 4] = *b"GRC1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 36;
/// Byte offset of the original-length field inside the header.
pub const LENGTH_OFFSET: u64 = 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContainerHeader {
    pub config: StrategyConfig,
    pub original_length: u64,
}

impl ContainerHeader {
    pub fn new(config: StrategyConfig) -> Self {
        ContainerHeader {
            config,
            original_length: 0,
        }
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..4].copy_from_slice(&MAGIC);
        b[4] = VERSION;
        b[5] = self.config.mode as u8;
        b[6..8].copy_from_slice(&(SIGMA as u16).to_le_bytes());
        b[8..16].copy_from_slice(&self.config.k.to_le_bytes());
        b[16..20].copy_from_slice(&self.config.eps_ppm.to_le_bytes());
        b[20..28].copy_from_slice(&self.config.ell.to_le_bytes());
        b[28..36].copy_from_slice(&self.original_length.to_le_bytes());
        b
    }

    pub fn from_bytes(b: &[u8; HEADER_LEN]) -> Result<Self> {
        if b[0..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        if b[4] != VERSION {
            return Err(Error::UnsupportedVersion(b[4]));
        }
        let mode = Mode::from_byte(b[5])
            .ok_or_else(|| Error::BadHeader(format!("unknown mode byte {}", b[5])))?;
        let sigma = u16::from_le_bytes([b[6], b[7]]);
        if sigma as u64 != SIGMA {
            return Err(Error::BadHeader(format!("unsupported alphabet size {sigma}")));
        }
        let le64 = |at: usize| u64::from_le_bytes(b[at..at + 8].try_into().unwrap());
        let config = StrategyConfig {
            mode,
            k: le64(8),
            eps_ppm: u32::from_le_bytes(b[16..20].try_into().unwrap()),
            ell: le64(20),
        };
        config
            .validate()
            .map_err(|e| Error::BadHeader(e.to_string()))?;
        Ok(ContainerHeader {
            config,
            original_length: le64(28),
        })
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut b = [0u8; HEADER_LEN];
        r.read_exact(&mut b).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => Error::BadHeader("stream shorter than header".into()),
            _ => Error::Read(e),
        })?;
        Self::from_bytes(&b)
    }
}

/// Bits needed for a leaf label after `created` nonterminals exist.
#[inline]
pub fn label_width(created: u64) -> u32 {
    let n = SIGMA + created;
    (64 - (n - 1).leading_zeros()).max(1)
}

const CHUNK: usize = 1 << 16;

/// MSB-first bit sink.
pub struct BitWriter<W: Write> {
    inner: W,
    acc: u64,
    nbits: u32,
    buf: Vec<u8>,
    flushed: u64,
    base: u64,
}

impl<W: Write> BitWriter<W> {
    /// `base` is the number of bytes already in the output, for error offsets.
    pub fn new(inner: W, base: u64) -> Self {
        BitWriter {
            inner,
            acc: 0,
            nbits: 0,
            buf: Vec::with_capacity(CHUNK),
            flushed: 0,
            base,
        }
    }

    #[inline]
    pub fn write_bit(&mut self, bit: bool) -> Result<()> {
        self.write_bits(bit as u64, 1)
    }

    /// Appends the low `n` bits of `value`, most significant first.
    #[inline]
    pub fn write_bits(&mut self, value: u64, n: u32) -> Result<()> {
        debug_assert!(n <= 64);
        if n > 32 {
            self.write_bits(value >> 32, n - 32)?;
            return self.write_bits(value & 0xffff_ffff, 32);
        }
        let masked = if n == 64 { value } else { value & ((1u64 << n) - 1) };
        self.acc = (self.acc << n) | masked;
        self.nbits += n;
        while self.nbits >= 8 {
            self.nbits -= 8;
            self.buf.push((self.acc >> self.nbits) as u8);
        }
        if self.buf.len() >= CHUNK {
            self.flush_buf()?;
        }
        Ok(())
    }

    /// Bits written so far, padding excluded.
    pub fn bit_len(&self) -> u64 {
        (self.flushed + self.buf.len() as u64) * 8 + self.nbits as u64
    }

    fn flush_buf(&mut self) -> Result<()> {
        if self.buf.is_empty() {
            return Ok(());
        }
        let offset = self.base + self.flushed;
        self.inner
            .write_all(&self.buf)
            .map_err(|source| Error::Write { offset, source })?;
        self.flushed += self.buf.len() as u64;
        self.buf.clear();
        Ok(())
    }

    /// Zero-pads to a byte boundary, flushes, and returns the sink and the
    /// number of payload bytes written.
    pub fn finish(mut self) -> Result<(W, u64)> {
        if self.nbits > 0 {
            let pad = 8 - self.nbits;
            self.write_bits(0, pad)?;
        }
        self.flush_buf()?;
        let offset = self.base + self.flushed;
        self.inner
            .flush()
            .map_err(|source| Error::Write { offset, source })?;
        Ok((self.inner, self.flushed))
    }
}

/// MSB-first bit source.
pub struct BitReader<R: Read> {
    inner: R,
    buf: Vec<u8>,
    pos: usize,
    bit: u32,
    eof: bool,
    consumed: u64,
}

impl<R: Read> BitReader<R> {
    pub fn new(inner: R) -> Self {
        BitReader {
            inner,
            buf: Vec::new(),
            pos: 0,
            bit: 0,
            eof: false,
            consumed: 0,
        }
    }

    #[inline]
    fn available(&self) -> u64 {
        (self.buf.len() - self.pos) as u64 * 8 - self.bit as u64
    }

    fn fill(&mut self, want_bits: u64) -> Result<()> {
        while !self.eof && self.available() < want_bits {
            if self.pos > 0 {
                self.buf.drain(..self.pos);
                self.pos = 0;
            }
            let old = self.buf.len();
            self.buf.resize(old + CHUNK, 0);
            let n = loop {
                match self.inner.read(&mut self.buf[old..]) {
                    Ok(n) => break n,
                    Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                    Err(e) => {
                        self.buf.truncate(old);
                        return Err(Error::Read(e));
                    }
                }
            };
            self.buf.truncate(old + n);
            if n == 0 {
                self.eof = true;
            }
        }
        Ok(())
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        Ok(self.read_bits(1)? == 1)
    }

    pub fn read_bits(&mut self, n: u32) -> Result<u64> {
        debug_assert!(n <= 64);
        if self.available() < n as u64 {
            self.fill(n as u64)?;
            if self.available() < n as u64 {
                return Err(Error::Truncated);
            }
        }
        let mut v = 0u64;
        let mut left = n;
        while left > 0 {
            let byte = self.buf[self.pos];
            let room = 8 - self.bit;
            let take = room.min(left);
            let shift = room - take;
            let chunk = (byte >> shift) as u64 & ((1u64 << take) - 1);
            v = if take == 64 { chunk } else { (v << take) | chunk };
            left -= take;
            self.bit += take;
            if self.bit == 8 {
                self.bit = 0;
                self.pos += 1;
                self.consumed += 1;
            }
        }
        Ok(v)
    }

    /// True when at most 7 bits remain. Those bits must be zero padding.
    pub fn at_padding(&mut self) -> Result<bool> {
        self.fill(8)?;
        let avail = self.available();
        if avail >= 8 {
            return Ok(false);
        }
        if avail > 0 && self.read_bits(avail as u32)? != 0 {
            return Err(Error::CorruptPadding);
        }
        Ok(true)
    }
}

/// Structure and label tallies for one segment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SegmentAccount {
    pub internal: u64,
    pub leaves: u64,
    pub structure_bits: u64,
    pub label_bits: u64,
}

/// Writes post-order tree events.
pub struct EventEncoder<W: Write> {
    bits: BitWriter<W>,
    open: u64,
    account: SegmentAccount,
}

impl<W: Write> EventEncoder<W> {
    pub fn new(inner: W, base: u64) -> Self {
        EventEncoder {
            bits: BitWriter::new(inner, base),
            open: 0,
            account: SegmentAccount::default(),
        }
    }

    pub fn leaf(&mut self, code: Code, created: u64) -> Result<()> {
        let w = label_width(created);
        debug_assert!(code.value() < SIGMA + created, "{code:?} not yet created");
        self.bits.write_bit(false)?;
        self.bits.write_bits(code.value(), w)?;
        self.open += 1;
        self.account.leaves += 1;
        self.account.structure_bits += 1;
        self.account.label_bits += w as u64;
        Ok(())
    }

    pub fn internal(&mut self) -> Result<()> {
        if self.open < 2 {
            return Err(Error::Framing("internal node needs two open subtrees"));
        }
        self.bits.write_bit(true)?;
        self.open -= 1;
        self.account.internal += 1;
        self.account.structure_bits += 1;
        Ok(())
    }

    /// Writes the virtual root closing the current tree.
    pub fn end_segment(&mut self) -> Result<SegmentAccount> {
        if self.open != 1 {
            return Err(Error::Framing("segment must close exactly one tree"));
        }
        self.bits.write_bit(true)?;
        self.open = 0;
        self.account.structure_bits += 1;
        Ok(std::mem::take(&mut self.account))
    }

    pub fn bit_len(&self) -> u64 {
        self.bits.bit_len()
    }

    pub fn finish(self) -> Result<(W, u64)> {
        if self.open != 0 {
            return Err(Error::Framing("stream finished inside a segment"));
        }
        self.bits.finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Leaf(Code),
    Internal,
    SegmentEnd,
    EndOfStream,
}

/// Reads post-order tree events.
pub struct EventDecoder<R: Read> {
    bits: BitReader<R>,
    open: u64,
    account: SegmentAccount,
    last: SegmentAccount,
    done: bool,
}

impl<R: Read> EventDecoder<R> {
    pub fn new(inner: R) -> Self {
        EventDecoder {
            bits: BitReader::new(inner),
            open: 0,
            account: SegmentAccount::default(),
            last: SegmentAccount::default(),
            done: false,
        }
    }

    /// Next event; `created` is the decoder's current creation count.
    pub fn read_event(&mut self, created: u64) -> Result<Event> {
        if self.done {
            return Ok(Event::EndOfStream);
        }
        if self.open == 0 && self.bits.at_padding()? {
            self.done = true;
            return Ok(Event::EndOfStream);
        }
        self.account.structure_bits += 1;
        if !self.bits.read_bit()? {
            let w = label_width(created);
            let v = self.bits.read_bits(w)?;
            if v >= SIGMA + created {
                return Err(Error::Corrupt(format!(
                    "leaf label {v} refers to an uncreated symbol"
                )));
            }
            self.open += 1;
            self.account.leaves += 1;
            self.account.label_bits += w as u64;
            return Ok(Event::Leaf(Code::new(v)));
        }
        match self.open {
            0 => Err(Error::Corrupt("internal node with no open subtrees".into())),
            1 => {
                self.open = 0;
                self.last = std::mem::take(&mut self.account);
                Ok(Event::SegmentEnd)
            }
            _ => {
                self.open -= 1;
                self.account.internal += 1;
                Ok(Event::Internal)
            }
        }
    }

    /// Tallies for the segment closed by the most recent `SegmentEnd`.
    pub fn last_segment(&self) -> SegmentAccount {
        self.last
    }

    /// Open subtrees in the current segment.
    pub fn open_subtrees(&self) -> u64 {
        self.open
    }
}
