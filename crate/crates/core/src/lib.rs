// SPDX-License-Identifier: Apache-2.0

//! Streaming grammar compression.
//!
//! Input bytes are parsed online into a straight-line program: every rule
//! derives a pair of symbols, and each repeated pair reuses its rule. The
//! parse tree of each segment is written as a bit stream of post-order
//! events. The rule dictionary can be bounded by frequency pruning, lossy
//! counting or per-block resets; the decoder replays the same pruning from
//! the stream alone.
//!
//! ```
//! use grc_core::{compress_to_vec, decompress_to_vec, StrategyConfig};
//!
//! let text = b"abracadabra abracadabra";
//! let packed = compress_to_vec(text, StrategyConfig::lossy(16).unwrap()).unwrap();
//! assert_eq!(decompress_to_vec(&packed).unwrap(), text);
//! ```

pub mod code;
pub mod codec;
pub mod compress;
pub mod decompress;
pub mod dictionary;
pub mod error;
pub mod observe;
pub mod parser;
pub mod strategy;
pub mod testkit;

pub use code::{Code, SIGMA};
pub use codec::{ContainerHeader, SegmentAccount, HEADER_LEN};
pub use compress::{
    compress_observed, compress_seekable, compress_stream, compress_to_vec, CompressStats,
    Compressor,
};
pub use decompress::{
    decompress_observed, decompress_stream, decompress_to_vec, expand, expand_to_vec,
    DecompressStats,
};
pub use dictionary::{PhraseDictionary, ReverseDictionary};
pub use error::{Error, Result};
pub use observe::{Boundary, BoundaryObserver, BoundarySnapshot, NoObserver, SnapshotLog};
pub use strategy::{Mode, Strategy, StrategyConfig};
