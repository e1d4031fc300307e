// SPDX-License-Identifier: Apache-2.0

use std::io;

use thiserror::Error;

use crate::code::Code;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("read error: {0}")]
    Read(#[source] io::Error),

    #[error("write failed at output byte {offset}: {source}")]
    Write {
        offset: u64,
        #[source]
        source: io::Error,
    },

    #[error("not a grc container (bad magic)")]
    BadMagic,

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("malformed header: {0}")]
    BadHeader(String),

    #[error("truncated stream")]
    Truncated,

    #[error("corrupt padding after final segment")]
    CorruptPadding,

    #[error("corrupt stream: {0}")]
    Corrupt(String),

    #[error("mirror divergence: digram ({0:?}, {1:?}) already has a live rule")]
    MirrorDivergence(Code, Code),

    #[error("broken closure: {0:?} has no live rule")]
    BrokenClosure(Code),

    #[error("integrity failure: header records {expected} bytes, recovered {actual}")]
    IntegrityMismatch { expected: u64, actual: u64 },

    #[error("empty segment")]
    EmptySegment,

    #[error("framing error: {0}")]
    Framing(&'static str),
}

impl Error {
    /// True for errors caused by a damaged or inconsistent container.
    pub fn is_corruption(&self) -> bool {
        matches!(
            self,
            Error::BadMagic
                | Error::UnsupportedVersion(_)
                | Error::BadHeader(_)
                | Error::Truncated
                | Error::CorruptPadding
                | Error::Corrupt(_)
                | Error::MirrorDivergence(..)
                | Error::BrokenClosure(_)
        )
    }
}
