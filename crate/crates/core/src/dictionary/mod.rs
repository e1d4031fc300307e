// SPDX-License-Identifier: Apache-2.0

//! Phrase dictionary: live production rules `z -> x y`, their frequency
//! counters, and the reverse dictionary answering "does `x y` have a rule".

mod reverse;

use std::collections::{BTreeSet, HashMap};
use std::hash::{BuildHasherDefault, Hasher};

use thiserror::Error;

use crate::code::{mix64, Code};

pub use reverse::{ReverseDictionary, SlotId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DictError {
    #[error("{0:?} is not a live rule")]
    NotLive(Code),
    #[error("removing {0:?} would orphan it: still referenced by a surviving rule")]
    ClosureViolation(Code),
}

/// Hasher for code-keyed maps. Keys are written as a single `u64`.
#[derive(Default)]
pub(crate) struct CodeHasher(u64);

impl Hasher for CodeHasher {
    #[inline]
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = mix64(self.0 ^ b as u64);
        }
    }

    #[inline]
    fn write_u64(&mut self, n: u64) {
        self.0 = mix64(self.0 ^ n);
    }
}

pub(crate) type CodeMap<V> = HashMap<Code, V, BuildHasherDefault<CodeHasher>>;

#[derive(Clone, Copy, Debug, Default)]
struct Meta {
    // Stored as `count + offset` so that decrementing every counter is O(1).
    stored: u64,
    refs: u32,
}

/// The set of live rules with per-rule counters.
///
/// Nonterminal codes are handed out densely: the `j`-th creation since the
/// last [`reset`](Self::reset) receives `SIGMA + j - 1`, whether or not
/// earlier rules were pruned.
#[derive(Clone, Debug)]
pub struct PhraseDictionary {
    reverse: ReverseDictionary,
    meta: Vec<Meta>,
    index: CodeMap<SlotId>,
    created: u64,
    offset: u64,
}

impl Default for PhraseDictionary {
    fn default() -> Self {
        PhraseDictionary::new(1.0)
    }
}

impl PhraseDictionary {
    pub fn new(alpha: f64) -> Self {
        PhraseDictionary {
            reverse: ReverseDictionary::new(alpha),
            meta: Vec::new(),
            index: CodeMap::default(),
            created: 0,
            offset: 0,
        }
    }

    /// Total nonterminals created since the last reset, pruned ones included.
    #[inline]
    pub fn created_count(&self) -> u64 {
        self.created
    }

    #[inline]
    pub fn live_count(&self) -> usize {
        self.reverse.len()
    }

    #[inline]
    pub fn reverse(&self) -> &ReverseDictionary {
        &self.reverse
    }

    #[inline]
    pub fn is_live(&self, code: Code) -> bool {
        self.index.contains_key(&code)
    }

    /// Right-hand side of `code`'s rule.
    #[inline]
    pub fn rule(&self, code: Code) -> Option<(Code, Code)> {
        self.index.get(&code).map(|&s| {
            let (_, x, y) = self.reverse.entry(s);
            (x, y)
        })
    }

    #[inline]
    pub fn counter(&self, code: Code) -> Option<u64> {
        self.index
            .get(&code)
            .map(|&s| self.meta[s as usize].stored.saturating_sub(self.offset))
    }

    /// Number of right-hand-side occurrences of `code` among live rules.
    pub fn references(&self, code: Code) -> u32 {
        self.index
            .get(&code)
            .map_or(0, |&s| self.meta[s as usize].refs)
    }

    /// Looks up `x y` without touching counters.
    #[inline]
    pub fn find(&self, x: Code, y: Code) -> Option<Code> {
        self.reverse.find(x, y).map(|(z, _)| z)
    }

    /// Looks up `x y`; on success increments the rule's counter.
    #[inline]
    pub fn hit(&mut self, x: Code, y: Code) -> Option<Code> {
        let (z, slot) = self.reverse.find(x, y)?;
        let m = &mut self.meta[slot as usize];
        m.stored = m.stored.saturating_add(1);
        Some(z)
    }

    /// Returns the rule for `x y`, creating it with counter `init` if absent.
    /// A hit increments the existing counter.
    pub fn lookup_or_create(&mut self, x: Code, y: Code, init: u64) -> (Code, bool) {
        match self.hit(x, y) {
            Some(z) => (z, false),
            None => (self.create(x, y, init), true),
        }
    }

    /// Creates `z -> x y` with counter `init` and returns `z`.
    ///
    /// The digram must be absent and both sides terminal or live.
    pub fn create(&mut self, x: Code, y: Code, init: u64) -> Code {
        debug_assert!(x.is_terminal() || self.is_live(x), "{x:?} not live");
        debug_assert!(y.is_terminal() || self.is_live(y), "{y:?} not live");
        let z = Code::nonterminal(self.created);
        self.created += 1;
        let slot = self.reverse.insert(z, x, y) as usize;
        let meta = Meta {
            stored: self.offset.saturating_add(init),
            refs: 0,
        };
        if slot == self.meta.len() {
            self.meta.push(meta);
        } else {
            self.meta[slot] = meta;
        }
        self.index.insert(z, slot as SlotId);
        self.add_ref(x, 1);
        self.add_ref(y, 1);
        z
    }

    #[inline]
    fn add_ref(&mut self, code: Code, delta: i32) {
        if code.is_nonterminal() {
            if let Some(&s) = self.index.get(&code) {
                let m = &mut self.meta[s as usize];
                m.refs = m.refs.wrapping_add_signed(delta);
            }
        }
    }

    /// Increments `code`'s counter by one.
    #[inline]
    pub fn bump(&mut self, code: Code) {
        if let Some(&s) = self.index.get(&code) {
            let m = &mut self.meta[s as usize];
            m.stored = m.stored.saturating_add(1);
        }
    }

    /// Right-hand side of `code`, bumping its counter.
    #[inline]
    pub(crate) fn rule_and_bump(&mut self, code: Code) -> Option<(Code, Code)> {
        let s = *self.index.get(&code)? as usize;
        self.meta[s].stored = self.meta[s].stored.saturating_add(1);
        let (_, x, y) = self.reverse.entry(s as SlotId);
        Some((x, y))
    }

    /// Overwrites `code`'s counter.
    pub fn set_counter(&mut self, code: Code, count: u64) {
        if let Some(&s) = self.index.get(&code) {
            self.meta[s as usize].stored = self.offset.saturating_add(count);
        }
    }

    /// Decrements every live counter by `by`, saturating at zero.
    pub fn decrement_all(&mut self, by: u64) {
        self.offset = self.offset.saturating_add(by);
    }

    /// Raw stored counter value; stays comparable across `decrement_all`.
    #[inline]
    pub(crate) fn stored_counter(&self, code: Code) -> Option<u64> {
        self.index.get(&code).map(|&s| self.meta[s as usize].stored)
    }

    #[inline]
    pub(crate) fn counter_offset(&self) -> u64 {
        self.offset
    }

    /// Removes `victims`. Every rule that references a victim must itself be
    /// a victim; otherwise nothing is removed.
    pub fn remove_rules<I>(&mut self, victims: I) -> Result<(), DictError>
    where
        I: IntoIterator<Item = Code>,
    {
        let victims: BTreeSet<Code> = victims.into_iter().collect();
        let mut inner: CodeMap<u32> = CodeMap::default();
        for &v in &victims {
            let (x, y) = self.rule(v).ok_or(DictError::NotLive(v))?;
            for child in [x, y] {
                if victims.contains(&child) {
                    *inner.entry(child).or_default() += 1;
                }
            }
        }
        for &v in &victims {
            if self.references(v) != inner.get(&v).copied().unwrap_or(0) {
                return Err(DictError::ClosureViolation(v));
            }
        }
        for &v in &victims {
            self.unlink(v);
        }
        Ok(())
    }

    /// Removes one rule whose reference count is already zero.
    pub(crate) fn unlink(&mut self, code: Code) -> Option<(Code, Code)> {
        let slot = self.index.remove(&code)?;
        let (_, x, y) = self.reverse.entry(slot);
        self.reverse.remove(x, y);
        self.add_ref(x, -1);
        self.add_ref(y, -1);
        Some((x, y))
    }

    /// Every nonterminal reachable from `roots` through right-hand sides.
    pub fn live_closure<I>(&self, roots: I) -> BTreeSet<Code>
    where
        I: IntoIterator<Item = Code>,
    {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<Code> = roots.into_iter().collect();
        while let Some(c) = stack.pop() {
            if c.is_terminal() || !seen.insert(c) {
                continue;
            }
            if let Some((x, y)) = self.rule(c) {
                stack.push(x);
                stack.push(y);
            }
        }
        seen
    }

    /// Drops every rule and restarts code numbering at `SIGMA`.
    pub fn reset(&mut self) {
        self.reverse.clear();
        self.meta.clear();
        self.index.clear();
        self.created = 0;
        self.offset = 0;
    }

    /// `(z, x, y, counter)` for every live rule, in arbitrary order.
    pub fn iter(&self) -> impl Iterator<Item = (Code, Code, Code, u64)> + '_ {
        self.index.iter().map(move |(&z, &s)| {
            let (_, x, y) = self.reverse.entry(s);
            let c = self.meta[s as usize].stored.saturating_sub(self.offset);
            (z, x, y, c)
        })
    }

    /// Live rules sorted by code.
    pub fn sorted_rules(&self) -> Vec<(Code, Code, Code, u64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable_by_key(|r| r.0);
        v
    }
}
