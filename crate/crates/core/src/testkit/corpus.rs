// SPDX-License-Identifier: Apache-2.0

use std::io::{self, Read, Write};

use rand::distributions::{Bernoulli, Distribution};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHABET: [u8; 4] = *b"ACGT";

/// Parameters of a noisy-repetitive corpus: `copies` copies of a random
/// base string over `ACGT`, each copy independently substituted at
/// `mutation_rate` per position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corpus {
    pub seed: u64,
    pub base_size: usize,
    pub copies: usize,
    pub mutation_rate: f64,
}

impl Corpus {
    pub fn new(seed: u64, base_size: usize, copies: usize, mutation_rate: f64) -> Option<Self> {
        (0.0..=1.0).contains(&mutation_rate).then_some(Corpus {
            seed,
            base_size,
            copies,
            mutation_rate,
        })
    }

    pub fn len(&self) -> u64 {
        self.base_size as u64 * self.copies as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn writer(&self) -> CorpusWriter {
        CorpusWriter::new(*self)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut w = self.writer();
        let mut buf = Vec::new();
        while w.next_copy(&mut buf) {
            out.write_all(&buf)?;
        }
        out.flush()
    }

    /// The corpus as a byte source.
    pub fn reader(&self) -> CorpusReader {
        CorpusReader {
            writer: self.writer(),
            buf: Vec::new(),
            pos: 0,
        }
    }

    pub fn to_vec(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(self.len() as usize);
        self.write_to(&mut v).expect("writing to a vector cannot fail");
        v
    }
}

/// Produces a corpus one copy at a time, so large corpora never need to be
/// held in memory.
pub struct CorpusWriter {
    rng: ChaCha8Rng,
    base: Vec<u8>,
    mutate: Bernoulli,
    remaining: usize,
}

impl CorpusWriter {
    fn new(c: Corpus) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        let base = (0..c.base_size).map(|_| ALPHABET[rng.gen_range(0..4)]).collect();
        CorpusWriter {
            rng,
            base,
            mutate: Bernoulli::new(c.mutation_rate).expect("rate checked in Corpus::new"),
            remaining: c.copies,
        }
    }

    pub fn base(&self) -> &[u8] {
        &self.base
    }

    /// Fills `buf` with the next copy; false once all copies are out.
    pub fn next_copy(&mut self, buf: &mut Vec<u8>) -> bool {
        if self.remaining == 0 {
            return false;
        }
        self.remaining -= 1;
        buf.clear();
        buf.extend_from_slice(&self.base);
        for b in buf.iter_mut() {
            if self.mutate.sample(&mut self.rng) {
                let i = ALPHABET.iter().position(|a| a == b).unwrap_or(0);
                *b = ALPHABET[(i + self.rng.gen_range(1..4)) % 4];
            }
        }
        true
    }
}

pub struct CorpusReader {
    writer: CorpusWriter,
    buf: Vec<u8>,
    pos: usize,
}

impl Read for CorpusReader {
    fn read(&mut self, out: &mut [u8]) -> io::Result<usize> {
        if self.pos == self.buf.len() {
            if !self.writer.next_copy(&mut self.buf) {
                return Ok(0);
            }
            self.pos = 0;
        }
        let n = out.len().min(self.buf.len() - self.pos);
        out[..n].copy_from_slice(&self.buf[self.pos..self.pos + n]);
        self.pos += n;
        Ok(n)
    }
}

/// `n` copies of `a`.
pub fn unary(n: usize) -> Vec<u8> {
    vec![b'a'; n]
}

/// `n` bytes repeating a random period of length `period`.
pub fn periodic(n: usize, period: usize, seed: u64) -> Vec<u8> {
    let unit = random_bytes(period.max(1), seed);
    unit.iter().copied().cycle().take(n).collect()
}

/// `n` uniformly random bytes.
pub fn random_bytes(n: usize, seed: u64) -> Vec<u8> {
    let mut v = vec![0u8; n];
    ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut v);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_repeats_base() {
        let c = Corpus::new(3, 1000, 2, 0.0).unwrap();
        let v = c.to_vec();
        assert_eq!(v.len(), 2000);
        assert_eq!(v[..1000], v[1000..]);
        assert!(v.iter().all(|b| ALPHABET.contains(b)));
    }

    #[test]
    fn deterministic() {
        let c = Corpus::new(7, 4096, 8, 0.05).unwrap();
        assert_eq!(c.to_vec(), c.to_vec());
        assert_ne!(c.to_vec(), Corpus { seed: 8, ..c }.to_vec());
    }

    #[test]
    fn mutation_rate_observed() {
        let c = Corpus::new(11, 100_000, 2, 0.09).unwrap();
        let mut w = c.writer();
        let base = w.base().to_vec();
        let mut copy = Vec::new();
        w.next_copy(&mut copy);
        let diff = base.iter().zip(&copy).filter(|(a, b)| a != b).count();
        let rate = diff as f64 / base.len() as f64;
        assert!((rate - 0.09).abs() < 0.005, "{rate}");
    }

    #[test]
    fn full_rate_changes_every_position() {
        let c = Corpus::new(1, 500, 1, 1.0).unwrap();
        let w = c.writer();
        let v = c.to_vec();
        assert!(w.base().iter().zip(&v).all(|(a, b)| a != b));
    }

    #[test]
    fn reader_matches_vec() {
        let c = Corpus::new(9, 777, 5, 0.02).unwrap();
        let mut v = Vec::new();
        c.reader().read_to_end(&mut v).unwrap();
        assert_eq!(v, c.to_vec());
    }

    #[test]
    fn rate_out_of_range() {
        assert!(Corpus::new(0, 1, 1, 1.5).is_none());
        assert!(Corpus::new(0, 1, 1, -0.1).is_none());
    }

    #[test]
    fn simple_corpora() {
        assert_eq!(unary(3), b"aaa");
        let p = periodic(10, 3, 1);
        assert_eq!(p[..7], p[3..]);
        assert_eq!(random_bytes(64, 5), random_bytes(64, 5));
    }
}
