// SPDX-License-Identifier: Apache-2.0

//! Dictionary-size control.
//!
//! Every strategy acts only at segment boundaries, where the parser queues
//! are drained. Pruning is a pure function of the dictionary and the
//! strategy state, which is what lets the decompressor replay it exactly.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use crate::code::Code;
use crate::dictionary::{CodeMap, PhraseDictionary};
use crate::error::{Error, Result};

pub const DEFAULT_K: u64 = 1 << 16;
pub const DEFAULT_EPS_PERCENT: f64 = 0.3;
pub const DEFAULT_ELL: u64 = 1 << 20;
pub const DEFAULT_ALPHA: f64 = 1.0;

/// Parts per million of a whole; `eps_ppm / PPM` is the vacancy fraction.
const PPM: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Mode {
    /// Unbounded dictionary, one segment.
    Plain = 0,
    /// Frequency counting with capacity `k` and vacancy rate `eps`.
    Freq = 1,
    /// Lossy counting over intervals of `ell` bytes.
    Lossy = 2,
    /// Independent blocks of `ell` bytes.
    Block = 3,
}

impl Mode {
    pub fn from_byte(b: u8) -> Option<Mode> {
        match b {
            0 => Some(Mode::Plain),
            1 => Some(Mode::Freq),
            2 => Some(Mode::Lossy),
            3 => Some(Mode::Block),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Plain => "plain",
            Mode::Freq => "freq",
            Mode::Lossy => "lossy",
            Mode::Block => "block",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "plain" => Ok(Mode::Plain),
            "freq" => Ok(Mode::Freq),
            "lossy" => Ok(Mode::Lossy),
            "block" => Ok(Mode::Block),
            other => Err(Error::InvalidConfig(format!("unknown mode {other:?}"))),
        }
    }
}

/// Mode plus parameters. Parameters the mode does not use are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StrategyConfig {
    pub mode: Mode,
    /// Maximum live rules (freq).
    pub k: u64,
    /// Vacancy rate in parts per million of the dictionary (freq);
    /// a rate of `eps` percent is `eps * 10^4`.
    pub eps_ppm: u32,
    /// Interval length in input bytes (lossy, block).
    pub ell: u64,
}

impl StrategyConfig {
    pub fn plain() -> Self {
        StrategyConfig {
            mode: Mode::Plain,
            k: 0,
            eps_ppm: 0,
            ell: 0,
        }
    }

    pub fn freq(k: u64, eps_percent: f64) -> Result<Self> {
        let config = StrategyConfig {
            mode: Mode::Freq,
            k,
            eps_ppm: eps_to_ppm(eps_percent)?,
            ell: 0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn lossy(ell: u64) -> Result<Self> {
        Self::interval(Mode::Lossy, ell)
    }

    pub fn block(ell: u64) -> Result<Self> {
        Self::interval(Mode::Block, ell)
    }

    fn interval(mode: Mode, ell: u64) -> Result<Self> {
        let config = StrategyConfig {
            mode,
            k: 0,
            eps_ppm: 0,
            ell,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        match self.mode {
            Mode::Plain => {
                if self.k != 0 || self.eps_ppm != 0 || self.ell != 0 {
                    return bad("plain mode takes no parameters".into());
                }
            }
            Mode::Freq => {
                if self.k < 2 {
                    return bad(format!("freq mode needs k >= 2, got {}", self.k));
                }
                if self.eps_ppm == 0 || self.eps_ppm as u64 >= PPM {
                    return bad(format!(
                        "freq mode needs 0 < eps < 100, got {}",
                        self.eps_percent()
                    ));
                }
                if self.ell != 0 {
                    return bad("freq mode takes no interval length".into());
                }
            }
            Mode::Lossy | Mode::Block => {
                if self.ell == 0 {
                    return bad(format!("{} mode needs ell >= 1", self.mode));
                }
                if self.k != 0 || self.eps_ppm != 0 {
                    return bad(format!("{} mode takes only ell", self.mode));
                }
            }
        }
        Ok(())
    }

    pub fn eps_percent(&self) -> f64 {
        self.eps_ppm as f64 / 1e4
    }

    /// Live rules allowed to remain after a freq prune: `floor(k (1 - eps/100))`.
    pub fn retain_target(&self) -> u64 {
        ((self.k as u128 * (PPM - self.eps_ppm as u64) as u128) / PPM as u128) as u64
    }
}

fn eps_to_ppm(eps_percent: f64) -> Result<u32> {
    if !(eps_percent > 0.0 && eps_percent < 100.0) {
        return Err(Error::InvalidConfig(format!(
            "eps must be a percentage in (0, 100), got {eps_percent}"
        )));
    }
    let ppm = (eps_percent * 1e4).round();
    if ppm < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "eps {eps_percent} is below the 0.0001% resolution"
        )));
    }
    Ok(ppm as u32)
}

/// Strategy state shared, by construction, between compressor and
/// decompressor.
#[derive(Clone, Debug)]
pub struct Strategy {
    config: StrategyConfig,
    delta: u64,
    consumed: u64,
    // Freq only: one entry per live rule keyed by a lower bound of its stored
    // counter. Counters only grow between prunes, so stale keys are fixed
    // lazily when they reach the top.
    heap: BinaryHeap<Reverse<(u64, Code)>>,
}

impl Strategy {
    pub fn new(config: StrategyConfig) -> Self {
        Strategy {
            config,
            delta: 0,
            consumed: 0,
            heap: BinaryHeap::new(),
        }
    }

    pub fn config(&self) -> &StrategyConfig {
        &self.config
    }

    /// Completed intervals (lossy).
    pub fn delta(&self) -> u64 {
        self.delta
    }

    /// Input bytes seen so far.
    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn record_byte(&mut self) {
        self.consumed += 1;
    }

    /// Counter given to a freshly created rule.
    pub fn counter_init(&self) -> u64 {
        match self.config.mode {
            Mode::Lossy => self.delta.saturating_add(1),
            _ => 1,
        }
    }

    /// Whether the compressor should close the current segment now.
    /// Called after each fully processed input byte.
    pub fn should_flush(&self, live_rules: usize) -> bool {
        match self.config.mode {
            Mode::Plain => false,
            Mode::Freq => live_rules as u64 >= self.config.k,
            Mode::Lossy | Mode::Block => self.consumed.is_multiple_of(self.config.ell),
        }
    }

    pub fn on_create(&mut self, dict: &PhraseDictionary, code: Code) {
        if self.config.mode == Mode::Freq {
            if let Some(stored) = dict.stored_counter(code) {
                self.heap.push(Reverse((stored, code)));
            }
        }
    }

    pub fn on_hit(&mut self, dict: &mut PhraseDictionary, code: Code) {
        dict.bump(code);
    }

    /// Applies the mode's boundary rule after a segment closes and returns
    /// the removed codes in ascending order.
    pub fn end_segment(&mut self, dict: &mut PhraseDictionary) -> Vec<Code> {
        match self.config.mode {
            Mode::Plain => Vec::new(),
            Mode::Freq if (dict.live_count() as u64) < self.config.k => Vec::new(),
            _ => self.prune(dict),
        }
    }

    /// Runs the mode's pruning step unconditionally.
    pub fn prune(&mut self, dict: &mut PhraseDictionary) -> Vec<Code> {
        let mut removed = match self.config.mode {
            Mode::Plain => Vec::new(),
            Mode::Freq => self.prune_freq(dict),
            Mode::Lossy => {
                self.delta += 1;
                let delta = self.delta;
                let marked: Vec<Code> = dict
                    .iter()
                    .filter(|&(_, _, _, c)| c < delta)
                    .map(|r| r.0)
                    .collect();
                let mut sweep = Sweep::default();
                sweep.mark(dict, marked);
                sweep.removed
            }
            Mode::Block => {
                self.delta += 1;
                let all = dict.iter().map(|r| r.0).collect();
                dict.reset();
                all
            }
        };
        removed.sort_unstable();
        removed
    }

    // Repeated "decrement every counter, mark zeros" passes, collapsed into
    // one step: `d` is the least pass count (at least one) after which the
    // unmarked rules fit the retain target. Marked rules that an unmarked
    // rule still derives are kept with their counter floored at 1.
    fn prune_freq(&mut self, dict: &mut PhraseDictionary) -> Vec<Code> {
        let target = self.config.retain_target();
        let live = dict.live_count() as u64;
        if live <= target {
            return Vec::new();
        }
        let need = live - target;
        let offset = dict.counter_offset();
        let mut d = 1u64;
        let mut marked = Vec::new();
        while let Some((stored, code)) = self.peek_fresh(dict) {
            let c = stored.saturating_sub(offset);
            if c > d {
                if marked.len() as u64 >= need {
                    break;
                }
                d = c;
            }
            self.heap.pop();
            marked.push(code);
        }
        let mut sweep = Sweep::default();
        sweep.mark(dict, marked);
        dict.decrement_all(d);
        for &code in sweep.pending.keys() {
            dict.set_counter(code, 1);
            let stored = dict.stored_counter(code).expect("protected rule is live");
            self.heap.push(Reverse((stored, code)));
        }
        sweep.removed
    }

    fn peek_fresh(&mut self, dict: &PhraseDictionary) -> Option<(u64, Code)> {
        while let Some(&Reverse((key, code))) = self.heap.peek() {
            match dict.stored_counter(code) {
                None => {
                    self.heap.pop();
                }
                Some(stored) if stored != key => {
                    self.heap.pop();
                    self.heap.push(Reverse((stored, code)));
                }
                Some(_) => return Some((key, code)),
            }
        }
        None
    }
}

/// Removes marked rules unless a surviving rule still derives them.
#[derive(Default)]
struct Sweep {
    // Marked but still referenced.
    pending: CodeMap<()>,
    removed: Vec<Code>,
}

impl Sweep {
    fn mark<I: IntoIterator<Item = Code>>(&mut self, dict: &mut PhraseDictionary, codes: I) {
        let mut ready = Vec::new();
        for code in codes {
            if dict.references(code) == 0 {
                ready.push(code);
            } else {
                self.pending.insert(code, ());
            }
        }
        while let Some(code) = ready.pop() {
            let (x, y) = dict.unlink(code).expect("marked rule is live");
            self.removed.push(code);
            for child in [x, y] {
                if self.pending.contains_key(&child) && dict.references(child) == 0 {
                    self.pending.remove(&child);
                    ready.push(child);
                }
            }
        }
    }
}
