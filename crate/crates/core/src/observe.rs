// SPDX-License-Identifier: Apache-2.0

//! Hooks called at every segment boundary, after pruning.

use crate::code::{mix64, mix_pair, Code};
use crate::codec::SegmentAccount;
use crate::dictionary::PhraseDictionary;
use crate::strategy::Strategy;

/// State visible at a segment boundary.
pub struct Boundary<'a> {
    /// Zero-based index of the segment just closed.
    pub segment: u64,
    /// Input bytes consumed (compressor) or recovered (decompressor).
    pub length: u64,
    pub account: SegmentAccount,
    /// Live rules just before pruning.
    pub live_before_prune: usize,
    pub removed: &'a [Code],
    pub dict: &'a PhraseDictionary,
    pub strategy: &'a Strategy,
}

impl Boundary<'_> {
    pub fn snapshot(&self) -> BoundarySnapshot {
        let mut rules = 0u64;
        let mut counters = 0u64;
        for (z, x, y, c) in self.dict.iter() {
            rules = rules.wrapping_add(mix_pair(z.value(), mix_pair(x.value(), y.value())));
            counters = counters.wrapping_add(mix_pair(z.value(), mix64(c)));
        }
        BoundarySnapshot {
            segment: self.segment,
            length: self.length,
            live: self.dict.live_count(),
            created_count: self.dict.created_count(),
            delta: self.strategy.delta(),
            rules_digest: rules,
            counters_digest: counters,
        }
    }
}

/// Order-independent digest of the dictionary state at a boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundarySnapshot {
    pub segment: u64,
    pub length: u64,
    pub live: usize,
    pub created_count: u64,
    pub delta: u64,
    pub rules_digest: u64,
    pub counters_digest: u64,
}

pub trait BoundaryObserver {
    fn on_boundary(&mut self, boundary: &Boundary<'_>);
}

/// Observer that ignores everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoObserver;

impl BoundaryObserver for NoObserver {
    #[inline]
    fn on_boundary(&mut self, _: &Boundary<'_>) {}
}

impl<F: FnMut(&Boundary<'_>)> BoundaryObserver for F {
    fn on_boundary(&mut self, boundary: &Boundary<'_>) {
        self(boundary)
    }
}

/// Collects a snapshot per boundary.
#[derive(Clone, Debug, Default)]
pub struct SnapshotLog {
    pub snapshots: Vec<BoundarySnapshot>,
    pub accounts: Vec<SegmentAccount>,
}

impl BoundaryObserver for SnapshotLog {
    fn on_boundary(&mut self, boundary: &Boundary<'_>) {
        self.snapshots.push(boundary.snapshot());
        self.accounts.push(boundary.account);
    }
}
