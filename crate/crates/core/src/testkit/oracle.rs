// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};

enum Node {
    Byte(u8),
    Pair(usize, usize),
}

struct Bits<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Bits<'_> {
    fn remaining(&self) -> usize {
        self.data.len() * 8 - self.pos
    }

    fn take(&mut self, n: u32) -> Result<u64> {
        if self.remaining() < n as usize {
            return Err(Error::Truncated);
        }
        let mut v = 0u64;
        for _ in 0..n {
            let bit = (self.data[self.pos / 8] >> (7 - self.pos % 8)) & 1;
            v = (v << 1) | bit as u64;
            self.pos += 1;
        }
        Ok(v)
    }
}

/// Decodes a container the slow way: every segment's parse tree is built in
/// full, with nonterminal leaves expanded from a table holding every rule
/// ever created, and the yields are concatenated. Ignores counters and
/// pruning entirely.
pub fn naive_grammar_oracle(container: &[u8]) -> Result<Vec<u8>> {
    if container.len() < 36 || &container[..4] != b"GRC1" {
        return Err(Error::BadMagic);
    }
    let block_mode = container[5] == 3;
    let expected = u64::from_le_bytes(container[28..36].try_into().unwrap());
    let mut bits = Bits {
        data: &container[36..],
        pos: 0,
    };
    let mut rules: Vec<(u64, u64)> = Vec::new();
    let mut out = Vec::new();
    loop {
        if bits.remaining() < 8 {
            let rest = bits.remaining() as u32;
            if bits.take(rest)? != 0 {
                return Err(Error::CorruptPadding);
            }
            break;
        }
        // One segment.
        let mut arena: Vec<Node> = Vec::new();
        // Code of each node that is a direct child in the encoded tree.
        let mut codes: Vec<u64> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        loop {
            if bits.take(1)? == 0 {
                let total = 256 + rules.len() as u64;
                let w = (64 - (total - 1).leading_zeros()).max(1);
                let label = bits.take(w)?;
                if label >= total {
                    return Err(Error::Corrupt(format!("label {label} out of range")));
                }
                let n = materialize(label, &rules, &mut arena);
                codes.resize(arena.len(), 0);
                codes[n] = label;
                stack.push(n);
            } else if stack.len() == 1 {
                break;
            } else {
                let (Some(b), Some(a)) = (stack.pop(), stack.pop()) else {
                    return Err(Error::Corrupt("internal node without children".into()));
                };
                rules.push((codes[a], codes[b]));
                arena.push(Node::Pair(a, b));
                codes.push(255 + rules.len() as u64);
                stack.push(arena.len() - 1);
            }
        }
        let root = stack.pop().unwrap();
        let mut walk = vec![root];
        while let Some(n) = walk.pop() {
            match arena[n] {
                Node::Byte(b) => out.push(b),
                Node::Pair(a, b) => {
                    walk.push(b);
                    walk.push(a);
                }
            }
        }
        if block_mode {
            rules.clear();
        }
    }
    if expected != 0 && expected != out.len() as u64 {
        return Err(Error::IntegrityMismatch {
            expected,
            actual: out.len() as u64,
        });
    }
    Ok(out)
}

fn materialize(code: u64, rules: &[(u64, u64)], arena: &mut Vec<Node>) -> usize {
    if code < 256 {
        arena.push(Node::Byte(code as u8));
    } else {
        let (x, y) = rules[(code - 256) as usize];
        let a = materialize(x, rules, arena);
        let b = materialize(y, rules, arena);
        arena.push(Node::Pair(a, b));
    }
    arena.len() - 1
}
