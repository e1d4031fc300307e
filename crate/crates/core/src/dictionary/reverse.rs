// SPDX-License-Identifier: Apache-2.0

//! Chained hash table from digrams to the nonterminal that derives them.

use crate::code::{mix_pair, Code};

pub(crate) const NIL: u32 = u32::MAX;

/// Index of an entry in the table's slab. Stable until the entry is removed.
pub type SlotId = u32;

#[derive(Clone, Copy, Debug)]
struct Entry {
    left: Code,
    x: Code,
    y: Code,
    next: u32,
}

/// Reverse dictionary: digram `(x, y)` to the nonterminal `z` with `z -> x y`.
///
/// Buckets are a power of two; the table doubles whenever the load
/// `entries / buckets` would exceed `alpha`.
#[derive(Clone, Debug)]
pub struct ReverseDictionary {
    entries: Vec<Entry>,
    free: Vec<u32>,
    buckets: Vec<u32>,
    len: usize,
    alpha: f64,
}

const MIN_BUCKETS: usize = 16;

impl ReverseDictionary {
    pub fn new(alpha: f64) -> Self {
        assert!(
            alpha > 0.0 && alpha <= 1.0,
            "load factor must be in (0, 1], got {alpha}"
        );
        ReverseDictionary {
            entries: Vec::new(),
            free: Vec::new(),
            buckets: vec![NIL; MIN_BUCKETS],
            len: 0,
            alpha,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    #[inline]
    pub fn load_factor(&self) -> f64 {
        self.alpha
    }

    #[inline]
    fn bucket_of(&self, x: Code, y: Code) -> usize {
        (mix_pair(x.value(), y.value()) as usize) & (self.buckets.len() - 1)
    }

    /// Finds the rule deriving `x y`.
    #[inline]
    pub fn find(&self, x: Code, y: Code) -> Option<(Code, SlotId)> {
        let mut cur = self.buckets[self.bucket_of(x, y)];
        while cur != NIL {
            let e = &self.entries[cur as usize];
            if e.x == x && e.y == y {
                return Some((e.left, cur));
            }
            cur = e.next;
        }
        None
    }

    /// Inserts `left -> x y`. The digram must not be present.
    pub fn insert(&mut self, left: Code, x: Code, y: Code) -> SlotId {
        debug_assert!(self.find(x, y).is_none(), "digram inserted twice");
        if (self.len + 1) as f64 > self.alpha * self.buckets.len() as f64 {
            self.grow();
        }
        let b = self.bucket_of(x, y);
        let entry = Entry {
            left,
            x,
            y,
            next: self.buckets[b],
        };
        let slot = match self.free.pop() {
            Some(s) => {
                self.entries[s as usize] = entry;
                s
            }
            None => {
                assert!(self.entries.len() < NIL as usize, "slab exhausted");
                self.entries.push(entry);
                (self.entries.len() - 1) as u32
            }
        };
        self.buckets[b] = slot;
        self.len += 1;
        slot
    }

    /// Unlinks the entry for `x y`, returning its slot (now free).
    pub fn remove(&mut self, x: Code, y: Code) -> Option<SlotId> {
        let b = self.bucket_of(x, y);
        let mut prev = NIL;
        let mut cur = self.buckets[b];
        while cur != NIL {
            let e = self.entries[cur as usize];
            if e.x == x && e.y == y {
                if prev == NIL {
                    self.buckets[b] = e.next;
                } else {
                    self.entries[prev as usize].next = e.next;
                }
                self.free.push(cur);
                self.len -= 1;
                return Some(cur);
            }
            prev = cur;
            cur = e.next;
        }
        None
    }

    /// `(left, x, y)` stored at `slot`.
    #[inline]
    pub fn entry(&self, slot: SlotId) -> (Code, Code, Code) {
        let e = &self.entries[slot as usize];
        (e.left, e.x, e.y)
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.free.clear();
        self.buckets.iter_mut().for_each(|b| *b = NIL);
        self.len = 0;
    }

    fn grow(&mut self) {
        let new_len = self.buckets.len() * 2;
        let mut buckets = vec![NIL; new_len];
        let mask = new_len - 1;
        for head in std::mem::take(&mut self.buckets) {
            let mut cur = head;
            while cur != NIL {
                let next = self.entries[cur as usize].next;
                let e = &mut self.entries[cur as usize];
                let b = (mix_pair(e.x.value(), e.y.value()) as usize) & mask;
                e.next = buckets[b];
                buckets[b] = cur;
                cur = next;
            }
        }
        self.buckets = buckets;
    }

    /// Iterates `(left, x, y)` over every stored rule, in bucket order.
    pub fn iter(&self) -> impl Iterator<Item = (Code, Code, Code)> + '_ {
        self.buckets.iter().flat_map(move |&head| {
            let mut cur = head;
            std::iter::from_fn(move || {
                if cur == NIL {
                    return None;
                }
                let e = &self.entries[cur as usize];
                cur = e.next;
                Some((e.left, e.x, e.y))
            })
        })
    }

    /// Mean number of chain nodes inspected by a successful lookup.
    pub fn mean_probe_length(&self) -> f64 {
        if self.len == 0 {
            return 0.0;
        }
        let mut total = 0u64;
        for &head in &self.buckets {
            let mut depth = 0u64;
            let mut cur = head;
            while cur != NIL {
                depth += 1;
                total += depth;
                cur = self.entries[cur as usize].next;
            }
        }
        total as f64 / self.len as f64
    }
}
