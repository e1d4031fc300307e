// SPDX-License-Identifier: Apache-2.0

//! Corpus generators, a brute-force reference decoder and instrumentation
//! used by the test suites and benchmarks.

mod corpus;
mod oracle;
mod probe;
mod trace;

pub use corpus::{periodic, random_bytes, unary, Corpus, CorpusReader, CorpusWriter};
pub use oracle::naive_grammar_oracle;
pub use probe::{mirror_check, space_probe, MirrorReport, SpaceProbe, SpaceReport};
pub use trace::{lossy_survival, RuleTrace, SurvivalReport};
