// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet};

use crate::code::Code;
use crate::observe::{Boundary, BoundaryObserver};

/// Full dictionary contents after every boundary. Meant for small inputs.
#[derive(Clone, Debug, Default)]
pub struct RuleTrace {
    /// Live rules `z -> (x, y, counter)` after pruning.
    pub live: Vec<BTreeMap<Code, (Code, Code, u64)>>,
    pub removed: Vec<Vec<Code>>,
    pub created: Vec<u64>,
}

impl BoundaryObserver for RuleTrace {
    fn on_boundary(&mut self, b: &Boundary<'_>) {
        self.live
            .push(b.dict.iter().map(|(z, x, y, c)| (z, (x, y, c))).collect());
        self.removed.push(b.removed.to_vec());
        self.created.push(b.dict.created_count());
    }
}

/// Outcome of checking the lossy survival rule over a trace.
#[derive(Clone, Debug, Default)]
pub struct SurvivalReport {
    /// Rules created in some interval and never hit there.
    pub checked: usize,
    /// Of those, rules removed exactly one boundary later.
    pub removed_next: usize,
    /// Of those, rules kept because a live rule still used them.
    pub protected: usize,
    pub violations: Vec<String>,
}

/// Checks, for a lossy-mode trace, that a rule created in interval `b`
/// is live after boundary `b`, and that if it was not hit in interval `b`
/// or `b + 1` it is gone after boundary `b + 1` unless a live rule uses it.
pub fn lossy_survival(trace: &RuleTrace) -> SurvivalReport {
    let mut r = SurvivalReport::default();
    let n = trace.live.len();
    for b in 0..n {
        let lo = if b == 0 { 0 } else { trace.created[b - 1] };
        for ord in lo..trace.created[b] {
            let z = Code::nonterminal(ord);
            let Some(&(_, _, c)) = trace.live[b].get(&z) else {
                r.violations
                    .push(format!("{z:?} created in interval {b} was pruned at boundary {b}"));
                continue;
            };
            if c != b as u64 + 1 || b + 1 == n {
                continue;
            }
            r.checked += 1;
            let next = &trace.live[b + 1];
            match next.get(&z) {
                None if trace.removed[b + 1].contains(&z) => r.removed_next += 1,
                None => r.violations.push(format!("{z:?} vanished without removal")),
                Some(&(_, _, c2)) if c2 > c => {}
                Some(_) => {
                    let users: BTreeSet<Code> =
                        next.values().flat_map(|&(x, y, _)| [x, y]).collect();
                    if users.contains(&z) {
                        r.protected += 1;
                    } else {
                        r.violations.push(format!(
                            "{z:?} kept at boundary {} with no hits and no users",
                            b + 1
                        ));
                    }
                }
            }
        }
    }
    r
}
