// SPDX-License-Identifier: Apache-2.0

use std::io::{self, Read, Seek, SeekFrom, Write};

use crate::code::Code;
use crate::codec::{ContainerHeader, EventEncoder, HEADER_LEN, LENGTH_OFFSET};
use crate::dictionary::PhraseDictionary;
use crate::error::{Error, Result};
use crate::observe::{Boundary, BoundaryObserver, NoObserver};
use crate::parser::{Parser, RuleSink};
use crate::strategy::{Strategy, StrategyConfig, DEFAULT_ALPHA};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompressStats {
    pub bytes_in: u64,
    pub bytes_out: u64,
    pub segments: u64,
    pub rules_created: u64,
    pub rules_live_peak: usize,
    pub bits_out: u64,
    /// Deepest level stack seen.
    pub max_depth: usize,
}

struct Engine<W: Write> {
    dict: PhraseDictionary,
    strategy: Strategy,
    enc: EventEncoder<W>,
    rules_created: u64,
    live_peak: usize,
}

impl<W: Write> RuleSink for Engine<W> {
    #[inline]
    fn find(&mut self, x: Code, y: Code) -> Option<Code> {
        self.dict.hit(x, y)
    }

    fn create(&mut self, x: Code, y: Code) -> Result<Code> {
        let z = self.dict.create(x, y, self.strategy.counter_init());
        self.strategy.on_create(&self.dict, z);
        self.enc.internal()?;
        self.rules_created += 1;
        self.live_peak = self.live_peak.max(self.dict.live_count());
        Ok(z)
    }

    #[inline]
    fn leaf(&mut self, code: Code) -> Result<()> {
        self.enc.leaf(code, self.dict.created_count())
    }
}

/// Streaming compressor. Writes the header on construction; feed bytes with
/// [`write`](Self::write) and close with [`finish`](Self::finish).
pub struct Compressor<W: Write, O: BoundaryObserver = NoObserver> {
    parser: Parser,
    engine: Engine<W>,
    observer: O,
    segments: u64,
    max_depth: usize,
}

impl<W: Write> Compressor<W> {
    pub fn new(out: W, config: StrategyConfig) -> Result<Self> {
        Self::with_observer(out, config, DEFAULT_ALPHA, NoObserver)
    }
}

impl<W: Write, O: BoundaryObserver> Compressor<W, O> {
    pub fn with_observer(mut out: W, config: StrategyConfig, alpha: f64, observer: O) -> Result<Self> {
        config.validate()?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "load factor must be in (0, 1], got {alpha}"
            )));
        }
        let header = ContainerHeader::new(config).to_bytes();
        out.write_all(&header)
            .map_err(|source| Error::Write { offset: 0, source })?;
        Ok(Compressor {
            parser: Parser::new(),
            engine: Engine {
                dict: PhraseDictionary::new(alpha),
                strategy: Strategy::new(config),
                enc: EventEncoder::new(out, HEADER_LEN as u64),
                rules_created: 0,
                live_peak: 0,
            },
            observer,
            segments: 0,
            max_depth: 0,
        })
    }

    pub fn dictionary(&self) -> &PhraseDictionary {
        &self.engine.dict
    }

    pub fn strategy(&self) -> &Strategy {
        &self.engine.strategy
    }

    pub fn write(&mut self, data: &[u8]) -> Result<()> {
        for &b in data {
            self.parser.push_symbol(Code::terminal(b), &mut self.engine)?;
            self.engine.strategy.record_byte();
            if self.engine.strategy.should_flush(self.engine.dict.live_count()) {
                self.close_segment()?;
            }
        }
        Ok(())
    }

    fn close_segment(&mut self) -> Result<()> {
        self.max_depth = self.max_depth.max(self.parser.depth());
        self.parser.finish_tree(&mut self.engine)?;
        let account = self.engine.enc.end_segment()?;
        let e = &mut self.engine;
        let live_before_prune = e.dict.live_count();
        let removed = e.strategy.end_segment(&mut e.dict);
        self.observer.on_boundary(&Boundary {
            segment: self.segments,
            length: e.strategy.consumed(),
            account,
            live_before_prune,
            removed: &removed,
            dict: &e.dict,
            strategy: &e.strategy,
        });
        self.segments += 1;
        Ok(())
    }

    /// Closes the last segment and flushes. Returns the sink and statistics.
    pub fn finish(mut self) -> Result<(W, CompressStats, O)> {
        if self.parser.has_pending() {
            self.close_segment()?;
        }
        let bits_out = self.engine.enc.bit_len();
        let (out, payload) = self.engine.enc.finish()?;
        let stats = CompressStats {
            bytes_in: self.engine.strategy.consumed(),
            bytes_out: HEADER_LEN as u64 + payload,
            segments: self.segments,
            rules_created: self.engine.rules_created,
            rules_live_peak: self.engine.live_peak,
            bits_out,
            max_depth: self.max_depth,
        };
        Ok((out, stats, self.observer))
    }
}

/// Compresses `input` to `out`. The header's length field is left at zero.
pub fn compress_stream<R: Read, W: Write>(
    input: R,
    config: StrategyConfig,
    out: W,
) -> Result<CompressStats> {
    compress_observed(input, config, DEFAULT_ALPHA, out, NoObserver).map(|(s, _)| s)
}

pub fn compress_observed<R: Read, W: Write, O: BoundaryObserver>(
    mut input: R,
    config: StrategyConfig,
    alpha: f64,
    out: W,
    observer: O,
) -> Result<(CompressStats, O)> {
    let mut c = Compressor::with_observer(out, config, alpha, observer)?;
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = match input.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(Error::Read(e)),
        };
        c.write(&buf[..n])?;
    }
    let (_, stats, observer) = c.finish()?;
    Ok((stats, observer))
}

/// Like [`compress_stream`], then seeks back and records the input length.
pub fn compress_seekable<R: Read, W: Write + Seek>(
    input: R,
    config: StrategyConfig,
    alpha: f64,
    mut out: W,
) -> Result<CompressStats> {
    let start = out.stream_position().map_err(|source| Error::Write { offset: 0, source })?;
    let (stats, _) = compress_observed(input, config, alpha, &mut out, NoObserver)?;
    let patch = |out: &mut W| -> io::Result<()> {
        out.seek(SeekFrom::Start(start + LENGTH_OFFSET))?;
        out.write_all(&stats.bytes_in.to_le_bytes())?;
        out.seek(SeekFrom::Start(start + stats.bytes_out))?;
        out.flush()
    };
    patch(&mut out).map_err(|source| Error::Write {
        offset: LENGTH_OFFSET,
        source,
    })?;
    Ok(stats)
}

/// Compresses an in-memory buffer; the header records its length.
pub fn compress_to_vec(data: &[u8], config: StrategyConfig) -> Result<Vec<u8>> {
    let mut out = io::Cursor::new(Vec::new());
    compress_seekable(data, config, DEFAULT_ALPHA, &mut out)?;
    Ok(out.into_inner())
}
