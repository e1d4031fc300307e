// SPDX-License-Identifier: Apache-2.0

//! Online construction of a post-order straight-line program.
//!
//! Each level of the parse tree has a queue of at most five symbols. The
//! first two symbols a queue ever receives are paired immediately; after
//! that the queue always keeps two already-parented symbols as left context
//! and builds either a 2-tree (`z -> q3 q4`) when the window `q1..q4` has no
//! landmark at position 2, or a 2-2-tree (`y -> q4 q5`, `z -> q3 y`) once a
//! fifth symbol arrives. Every build result moves one level up.
//!
//! Tree nodes are emitted in post-order as soon as that order is certain:
//! a node built by a hit stays a pending leaf until its parent turns out to
//! be new. When a new node is created, every pending node to its left is
//! guaranteed to end up under a new node as well, so those leaves are
//! written first.

use crate::code::Code;
use crate::error::{Error, Result};

/// Whether position 2 of the window `w1 w2 w3 w4` carries a landmark.
///
/// Adjacent symbols get an edge label: `-1` for equal symbols, otherwise
/// `2j + bit_j(y)` for the lowest bit `j` where `x` and `y` differ. The
/// middle edge is a landmark when it is strictly greater than the edge on
/// its left and at least the edge on its right.
#[inline]
pub fn landmark(w1: Code, w2: Code, w3: Code, w4: Code) -> bool {
    let mid = edge_label(w2, w3);
    mid > edge_label(w1, w2) && mid >= edge_label(w3, w4)
}

#[inline]
fn edge_label(x: Code, y: Code) -> i32 {
    let diff = x.value() ^ y.value();
    if diff == 0 {
        return -1;
    }
    let j = diff.trailing_zeros();
    (2 * j + ((y.value() >> j) & 1) as u32) as i32
}

/// Receives the parser's rule lookups and tree events.
pub trait RuleSink {
    /// Returns the live rule deriving `x y`, counting the occurrence.
    fn find(&mut self, x: Code, y: Code) -> Option<Code>;
    /// Creates `z -> x y` and emits its internal node. Both children have
    /// been emitted already.
    fn create(&mut self, x: Code, y: Code) -> Result<Code>;
    /// Emits a leaf.
    fn leaf(&mut self, code: Code) -> Result<()>;
}

/// A symbol in a level queue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Node {
    pub code: Code,
    /// Whether the node's subtree has been written. Hits and terminals start
    /// out unwritten; they become leaves only if their parent is new.
    pub emitted: bool,
}

impl Node {
    fn pending(code: Code) -> Node {
        Node {
            code,
            emitted: false,
        }
    }
}

const QUEUE_CAP: usize = 5;

#[derive(Clone, Debug)]
pub struct LevelQueue {
    slots: [Node; QUEUE_CAP],
    len: u8,
    // Leading slots already consumed by a build (0 before the first build,
    // 2 afterwards).
    context: u8,
}

impl Default for LevelQueue {
    fn default() -> Self {
        LevelQueue {
            slots: [Node::pending(Code::new(0)); QUEUE_CAP],
            len: 0,
            context: 0,
        }
    }
}

impl LevelQueue {
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn symbols(&self) -> impl Iterator<Item = Code> + '_ {
        self.slots[..self.len()].iter().map(|n| n.code)
    }

    /// Symbols not yet consumed by a build.
    pub fn unparented(&self) -> &[Node] {
        &self.slots[self.context as usize..self.len()]
    }

    fn push(&mut self, node: Node) {
        debug_assert!(self.len() < QUEUE_CAP);
        self.slots[self.len()] = node;
        self.len += 1;
    }

    fn keep_last_two(&mut self) {
        let n = self.len();
        self.slots.copy_within(n - 2..n, 0);
        self.len = 2;
        self.context = 2;
    }

    fn clear(&mut self) {
        self.len = 0;
        self.context = 0;
    }
}

enum Child {
    Slot(usize),
    Free(Node),
}

/// The per-level queue stack.
#[derive(Clone, Debug, Default)]
pub struct Parser {
    levels: Vec<LevelQueue>,
    open: bool,
}

impl Parser {
    pub fn new() -> Self {
        Parser::default()
    }

    /// Number of levels currently in use.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> Option<&LevelQueue> {
        self.levels.get(k)
    }

    /// True if symbols were consumed since the last drain.
    pub fn has_pending(&self) -> bool {
        self.open
    }

    /// Feeds one input symbol at the bottom level.
    pub fn push_symbol<S: RuleSink>(&mut self, x: Code, sink: &mut S) -> Result<()> {
        self.open = true;
        self.process_symbol(0, Node::pending(x), sink)
    }

    /// Enqueues `node` at level `k` (zero based) and builds as needed.
    pub fn process_symbol<S: RuleSink>(&mut self, k: usize, node: Node, sink: &mut S) -> Result<()> {
        let mut k = k;
        let mut node = node;
        loop {
            if k == self.levels.len() {
                self.levels.push(LevelQueue::default());
            }
            let q = &mut self.levels[k];
            q.push(node);
            let built = match (q.context, q.len) {
                (0, 2) => Some(self.join(k, Child::Slot(0), Child::Slot(1), sink)?),
                (2, 4) => {
                    let s = &q.slots;
                    if landmark(s[0].code, s[1].code, s[2].code, s[3].code) {
                        None
                    } else {
                        Some(self.join(k, Child::Slot(2), Child::Slot(3), sink)?)
                    }
                }
                (2, 5) => {
                    let y = self.join(k, Child::Slot(3), Child::Slot(4), sink)?;
                    Some(self.join(k, Child::Slot(2), Child::Free(y), sink)?)
                }
                _ => None,
            };
            match built {
                Some(parent) => {
                    self.levels[k].keep_last_two();
                    node = parent;
                    k += 1;
                }
                None => return Ok(()),
            }
        }
    }

    // Builds the parent of two level-`k` children. Slot children are
    // queue positions; a free child lies to the right of all of them.
    fn join<S: RuleSink>(&mut self, k: usize, a: Child, b: Child, sink: &mut S) -> Result<Node> {
        let code_of = |c: &Child, q: &LevelQueue| match *c {
            Child::Slot(i) => q.slots[i].code,
            Child::Free(n) => n.code,
        };
        let (x, y) = {
            let q = &self.levels[k];
            (code_of(&a, q), code_of(&b, q))
        };
        if let Some(z) = sink.find(x, y) {
            return Ok(Node::pending(z));
        }
        let limit = match (&a, &b) {
            (_, Child::Slot(j)) => j + 1,
            (Child::Slot(i), Child::Free(_)) => i + 1,
            (Child::Free(_), Child::Free(_)) => 0,
        };
        self.emit_above(k, sink)?;
        let q = &mut self.levels[k];
        let start = q.context as usize;
        emit_nodes(&mut q.slots[start..limit.max(start)], sink)?;
        for c in [a, b] {
            if let Child::Free(n) = c {
                if !n.emitted {
                    sink.leaf(n.code)?;
                }
            }
        }
        let z = sink.create(x, y)?;
        Ok(Node {
            code: z,
            emitted: true,
        })
    }

    // Writes pending unparented nodes on levels above `k`, leftmost (top)
    // first.
    fn emit_above<S: RuleSink>(&mut self, k: usize, sink: &mut S) -> Result<()> {
        for q in self.levels[k + 1..].iter_mut().rev() {
            let (start, end) = (q.context as usize, q.len());
            emit_nodes(&mut q.slots[start..end], sink)?;
        }
        Ok(())
    }

    /// Completes the current tree and returns its root.
    ///
    /// From the bottom level up, each level's unparented symbols plus the
    /// symbol carried from below are folded right to left into one symbol,
    /// which is carried to the next level. All queues end empty.
    pub fn drain<S: RuleSink>(&mut self, sink: &mut S) -> Result<Node> {
        if !self.open {
            return Err(Error::EmptySegment);
        }
        let mut carry: Option<Node> = None;
        for k in 0..self.levels.len() {
            let mut items: Vec<Node> = self.levels[k].unparented().to_vec();
            items.extend(carry.take());
            self.levels[k].clear();
            while items.len() > 1 {
                let b = items.pop().unwrap();
                let a = items.pop().unwrap();
                let parent = match sink.find(a.code, b.code) {
                    Some(z) => Node::pending(z),
                    None => {
                        self.emit_above(k, sink)?;
                        emit_nodes(&mut items, sink)?;
                        for n in [a, b] {
                            if !n.emitted {
                                sink.leaf(n.code)?;
                            }
                        }
                        Node {
                            code: sink.create(a.code, b.code)?,
                            emitted: true,
                        }
                    }
                };
                items.push(parent);
            }
            carry = items.pop();
        }
        self.levels.clear();
        self.open = false;
        carry.ok_or(Error::EmptySegment)
    }

    /// Drains and writes the root as a leaf if it is still pending.
    pub fn finish_tree<S: RuleSink>(&mut self, sink: &mut S) -> Result<Code> {
        let root = self.drain(sink)?;
        if !root.emitted {
            sink.leaf(root.code)?;
        }
        Ok(root.code)
    }
}

fn emit_nodes<S: RuleSink>(nodes: &mut [Node], sink: &mut S) -> Result<()> {
    for n in nodes.iter_mut().filter(|n| !n.emitted) {
        sink.leaf(n.code)?;
        n.emitted = true;
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dictionary::PhraseDictionary;
    use proptest::prelude::*;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub(crate) enum Ev {
        Leaf(Code),
        Internal(Code),
    }

    /// Plain dictionary plus an event log.
    #[derive(Default)]
    pub(crate) struct Recorder {
        pub dict: PhraseDictionary,
        pub events: Vec<Ev>,
        pub rules_built: Vec<(Code, Code, Code)>,
    }

    impl RuleSink for Recorder {
        fn find(&mut self, x: Code, y: Code) -> Option<Code> {
            self.dict.hit(x, y)
        }
        fn create(&mut self, x: Code, y: Code) -> Result<Code> {
            let z = self.dict.create(x, y, 1);
            self.events.push(Ev::Internal(z));
            self.rules_built.push((z, x, y));
            Ok(z)
        }
        fn leaf(&mut self, code: Code) -> Result<()> {
            self.events.push(Ev::Leaf(code));
            Ok(())
        }
    }

    fn t(b: u8) -> Code {
        Code::terminal(b)
    }

    fn x(i: u64) -> Code {
        Code::nonterminal(i - 1)
    }

    fn feed(p: &mut Parser, r: &mut Recorder, s: &[u8]) {
        for &b in s {
            p.push_symbol(t(b), r).unwrap();
        }
    }

    /// Rebuilds the text from post-order events; checks stack discipline.
    pub(crate) fn replay(events: &[Ev], dict: &PhraseDictionary) -> Vec<u8> {
        let mut stack: Vec<Code> = Vec::new();
        for e in events {
            match *e {
                Ev::Leaf(c) => stack.push(c),
                Ev::Internal(z) => {
                    let b = stack.pop().expect("underflow");
                    let a = stack.pop().expect("underflow");
                    assert_eq!(dict.rule(z), Some((a, b)), "children of {z:?}");
                    stack.push(z);
                }
            }
        }
        assert_eq!(stack.len(), 1, "segment must close one tree");
        let mut out = Vec::new();
        let mut todo = vec![stack[0]];
        while let Some(c) = todo.pop() {
            match c.as_byte() {
                Some(b) => out.push(b),
                None => {
                    let (a, b) = dict.rule(c).unwrap();
                    todo.push(b);
                    todo.push(a);
                }
            }
        }
        out
    }

    #[test]
    fn landmark_examples() {
        let (a, b) = (t(b'a'), t(b'b'));
        assert!(!landmark(a, a, a, a));
        assert_eq!(edge_label(t(97), t(98)), 0);
        assert_eq!(edge_label(t(98), t(97)), 1);
        assert!(landmark(a, b, a, b));
        assert!(!landmark(a, b, b, a));
        assert!(!landmark(t(1), t(7), t(7), t(200)));
    }

    #[test]
    fn unary_prefix() {
        let mut p = Parser::new();
        let mut r = Recorder::default();
        feed(&mut p, &mut r, b"aaaa");
        assert_eq!(r.dict.rule(x(1)), Some((t(b'a'), t(b'a'))));
        assert_eq!(p.level(0).unwrap().symbols().collect::<Vec<_>>(), vec![t(b'a'), t(b'a')]);
        // The second pair is a hit on X1.
        assert_eq!(r.dict.counter(x(1)), Some(2));
    }

    #[test]
    fn periodic_builds_two_two_tree() {
        let mut p = Parser::new();
        let mut r = Recorder::default();
        feed(&mut p, &mut r, b"abab");
        assert_eq!(r.rules_built.len(), 1, "only the opening pair");
        feed(&mut p, &mut r, b"a");
        let built = &r.rules_built[1..];
        assert_eq!(built[0].1, t(b'b'));
        assert_eq!(built[0].2, t(b'a'));
        assert_eq!(built[1], (built[1].0, t(b'a'), built[0].0));
    }

    #[test]
    fn short_inputs_wait() {
        let mut p = Parser::new();
        let mut r = Recorder::default();
        feed(&mut p, &mut r, b"a");
        assert!(r.rules_built.is_empty());
    }

    #[test]
    fn drain_examples() {
        let mut p = Parser::new();
        let mut r = Recorder::default();
        feed(&mut p, &mut r, b"a");
        assert_eq!(p.finish_tree(&mut r).unwrap(), t(b'a'));
        assert!(r.dict.live_count() == 0);
        assert_eq!(r.events, vec![Ev::Leaf(t(b'a'))]);

        let mut p = Parser::new();
        let mut r = Recorder::default();
        feed(&mut p, &mut r, b"ab");
        assert_eq!(p.finish_tree(&mut r).unwrap(), x(1));
        assert_eq!(r.dict.rule(x(1)), Some((t(b'a'), t(b'b'))));

        let mut p = Parser::new();
        let mut r = Recorder::default();
        feed(&mut p, &mut r, b"abc");
        assert_eq!(p.finish_tree(&mut r).unwrap(), x(2));
        assert_eq!(r.dict.rule(x(2)), Some((x(1), t(b'c'))));
        assert_eq!(
            r.events,
            vec![
                Ev::Leaf(t(b'a')),
                Ev::Leaf(t(b'b')),
                Ev::Internal(x(1)),
                Ev::Leaf(t(b'c')),
                Ev::Internal(x(2))
            ]
        );
        assert_eq!(p.depth(), 0);
    }

    #[test]
    fn drain_empty_is_error() {
        let mut p = Parser::new();
        let mut r = Recorder::default();
        assert!(matches!(p.drain(&mut r), Err(Error::EmptySegment)));
    }

    #[test]
    fn unary_rule_count_is_logarithmic() {
        let mut p = Parser::new();
        let mut r = Recorder::default();
        for _ in 0..(1u32 << 20) {
            p.push_symbol(t(b'a'), &mut r).unwrap();
        }
        p.finish_tree(&mut r).unwrap();
        assert!(r.dict.created_count() <= 60, "{}", r.dict.created_count());
    }

    fn run(s: &[u8]) -> Recorder {
        let mut p = Parser::new();
        let mut r = Recorder::default();
        feed(&mut p, &mut r, s);
        p.finish_tree(&mut r).unwrap();
        r
    }

    #[test]
    fn post_order_on_mixed_input() {
        let text = b"abracadabra abracadabra abracadabra, said the magician".repeat(5);
        let r = run(&text);
        assert_eq!(replay(&r.events, &r.dict), text);
    }

    proptest! {
        #[test]
        fn landmark_is_pure(a: u16, b: u16, c: u16, d: u16) {
            let w = [a, b, c, d].map(|v| Code::new(v as u64));
            prop_assert_eq!(landmark(w[0], w[1], w[2], w[3]), landmark(w[0], w[1], w[2], w[3]));
            if b == c {
                prop_assert!(!landmark(w[0], w[1], w[2], w[3]));
            }
        }

        #[test]
        fn events_form_one_post_order_tree(text in proptest::collection::vec(0u8..4, 1..600)) {
            let r = run(&text);
            prop_assert_eq!(replay(&r.events, &r.dict), text);
            let internal = r.events.iter().filter(|e| matches!(e, Ev::Internal(_))).count();
            let leaves = r.events.len() - internal;
            prop_assert_eq!(leaves, internal + 1);
        }

        #[test]
        fn events_on_arbitrary_bytes(text in proptest::collection::vec(any::<u8>(), 1..300)) {
            let r = run(&text);
            prop_assert_eq!(replay(&r.events, &r.dict), text);
        }
    }
}
