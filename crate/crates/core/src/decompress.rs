// SPDX-License-Identifier: Apache-2.0

use std::io::{self, Read, Write};

use crate::code::Code;
use crate::codec::{ContainerHeader, Event, EventDecoder, HEADER_LEN};
use crate::dictionary::PhraseDictionary;
use crate::error::{Error, Result};
use crate::observe::{Boundary, BoundaryObserver, NoObserver};
use crate::strategy::{Strategy, DEFAULT_ALPHA};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecompressStats {
    pub header: ContainerHeader,
    pub bytes_out: u64,
    pub segments: u64,
    pub rules_created: u64,
    pub rules_live_peak: usize,
}

const OUT_BUF: usize = 1 << 16;

struct Output<W: Write> {
    inner: W,
    buf: Vec<u8>,
    flushed: u64,
}

impl<W: Write> Output<W> {
    #[inline]
    fn push(&mut self, b: u8) -> Result<()> {
        self.buf.push(b);
        if self.buf.len() >= OUT_BUF {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        if let Err(source) = self.inner.write_all(&self.buf) {
            return Err(Error::Write {
                offset: self.flushed,
                source,
            });
        }
        self.flushed += self.buf.len() as u64;
        self.buf.clear();
        Ok(())
    }

    fn finish(mut self) -> Result<W> {
        self.flush()?;
        let offset = self.flushed;
        self.inner
            .flush()
            .map_err(|source| Error::Write { offset, source })?;
        Ok(self.inner)
    }
}

/// Writes the expansion of `root` to `out` without touching counters.
/// Returns the number of bytes written.
pub fn expand<W: Write>(root: Code, dict: &PhraseDictionary, out: &mut W) -> Result<u64> {
    let mut o = Output {
        inner: out,
        buf: Vec::with_capacity(OUT_BUF),
        flushed: 0,
    };
    let mut stack = vec![root];
    while let Some(c) = stack.pop() {
        match c.as_byte() {
            Some(b) => o.push(b)?,
            None => {
                let (x, y) = dict.rule(c).ok_or(Error::BrokenClosure(c))?;
                stack.push(y);
                stack.push(x);
            }
        }
    }
    o.flush()?;
    Ok(o.flushed)
}

/// Expands `root` into a fresh vector.
pub fn expand_to_vec(root: Code, dict: &PhraseDictionary) -> Result<Vec<u8>> {
    let mut v = Vec::new();
    expand(root, dict, &mut v)?;
    Ok(v)
}

pub fn decompress_stream<R: Read, W: Write>(input: R, out: W) -> Result<DecompressStats> {
    decompress_observed(input, out, DEFAULT_ALPHA, NoObserver).map(|(s, _)| s)
}

/// Decodes a container, mirroring the compressor's dictionary. `observer`
/// sees the same boundaries, in the same states, as the compressor's.
pub fn decompress_observed<R: Read, W: Write, O: BoundaryObserver>(
    mut input: R,
    out: W,
    alpha: f64,
    mut observer: O,
) -> Result<(DecompressStats, O)> {
    let header = ContainerHeader::read_from(&mut input)?;
    let mut dict = PhraseDictionary::new(alpha);
    let mut strategy = Strategy::new(header.config);
    let mut dec = EventDecoder::new(io::BufReader::with_capacity(1 << 16, input));
    let mut out = Output {
        inner: out,
        buf: Vec::with_capacity(OUT_BUF),
        flushed: 0,
    };
    let mut stack: Vec<Code> = Vec::new();
    let mut walk: Vec<Code> = Vec::new();
    let mut recovered = 0u64;
    let mut segments = 0u64;
    let mut rules_created = 0u64;
    let mut live_peak = 0usize;

    loop {
        match dec.read_event(dict.created_count())? {
            Event::Leaf(c) => {
                if c.is_nonterminal() && !dict.is_live(c) {
                    return Err(Error::Corrupt(format!("leaf {c:?} is not a live rule")));
                }
                stack.push(c);
            }
            Event::Internal => {
                let (Some(y), Some(x)) = (stack.pop(), stack.pop()) else {
                    return Err(Error::Corrupt("internal node without two children".into()));
                };
                if dict.find(x, y).is_some() {
                    return Err(Error::MirrorDivergence(x, y));
                }
                // Every node of the segment's tree is counted once when the
                // segment closes, including this one.
                let init = strategy.counter_init() - 1;
                let z = dict.create(x, y, init);
                strategy.on_create(&dict, z);
                rules_created += 1;
                live_peak = live_peak.max(dict.live_count());
                stack.push(z);
            }
            Event::SegmentEnd => {
                let root = match (stack.pop(), stack.is_empty()) {
                    (Some(r), true) => r,
                    _ => return Err(Error::Corrupt("segment does not form one tree".into())),
                };
                walk.push(root);
                while let Some(c) = walk.pop() {
                    match c.as_byte() {
                        Some(b) => {
                            out.push(b)?;
                            recovered += 1;
                        }
                        None => {
                            let (x, y) = dict.rule_and_bump(c).ok_or(Error::BrokenClosure(c))?;
                            walk.push(y);
                            walk.push(x);
                        }
                    }
                }
                let live_before_prune = dict.live_count();
                let removed = strategy.end_segment(&mut dict);
                observer.on_boundary(&Boundary {
                    segment: segments,
                    length: recovered,
                    account: dec.last_segment(),
                    live_before_prune,
                    removed: &removed,
                    dict: &dict,
                    strategy: &strategy,
                });
                segments += 1;
            }
            Event::EndOfStream => break,
        }
    }
    out.finish()?;
    if header.original_length != 0 && header.original_length != recovered {
        return Err(Error::IntegrityMismatch {
            expected: header.original_length,
            actual: recovered,
        });
    }
    let stats = DecompressStats {
        header,
        bytes_out: recovered,
        segments,
        rules_created,
        rules_live_peak: live_peak,
    };
    Ok((stats, observer))
}

/// Decodes an in-memory container.
pub fn decompress_to_vec(container: &[u8]) -> Result<Vec<u8>> {
    let mut v = Vec::with_capacity(container.len().saturating_sub(HEADER_LEN) * 4);
    decompress_stream(container, &mut v)?;
    Ok(v)
}
