// SPDX-License-Identifier: Apache-2.0

use std::fmt;

/// Alphabet size. Input is byte-oriented, so every byte value is a terminal.
pub const SIGMA: u64 = 256;

/// A grammar symbol: a terminal byte (`< SIGMA`) or a nonterminal
/// (`>= SIGMA`, numbered in creation order).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Code(u64);

impl Code {
    #[inline]
    pub const fn new(value: u64) -> Self {
        Code(value)
    }

    #[inline]
    pub const fn terminal(byte: u8) -> Self {
        Code(byte as u64)
    }

    /// The nonterminal created `ordinal`-th (zero based) since the last reset.
    #[inline]
    pub const fn nonterminal(ordinal: u64) -> Self {
        Code(SIGMA + ordinal)
    }

    #[inline]
    pub const fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn is_terminal(self) -> bool {
        self.0 < SIGMA
    }

    #[inline]
    pub const fn is_nonterminal(self) -> bool {
        self.0 >= SIGMA
    }

    /// Returns the byte for a terminal code.
    #[inline]
    pub fn as_byte(self) -> Option<u8> {
        if self.is_terminal() {
            Some(self.0 as u8)
        } else {
            None
        }
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_byte() {
            Some(b) if b.is_ascii_graphic() => write!(f, "'{}'", b as char),
            Some(b) => write!(f, "#{b}"),
            None => write!(f, "X{}", self.0 - SIGMA + 1),
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<u8> for Code {
    fn from(b: u8) -> Self {
        Code::terminal(b)
    }
}

/// Seedless 64-bit avalanche mixer (splitmix64 finalizer). Used for digram
/// hashing and snapshot digests so results are identical on every machine.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
pub(crate) fn mix_pair(x: u64, y: u64) -> u64 {
    mix64(x.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ mix64(y ^ 0x2545_f491_4f6c_dd1d))
}
