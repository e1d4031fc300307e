// SPDX-License-Identifier: Apache-2.0

//! Prints a comparison table for every mode on a generated corpus.
//!
//! Usage: desk [base-size-bytes] [copies] [mutation-rate] [ell]

use std::io;
use std::process::ExitCode;

use grc_bench::{desk_table, print_table};
use grc_core::testkit::Corpus;
use grc_core::StrategyConfig;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.into());
    let parsed = (|| -> Option<(usize, usize, f64, u64)> {
        Some((
            arg(0, "1048576").parse().ok()?,
            arg(1, "16").parse().ok()?,
            arg(2, "0.01").parse().ok()?,
            arg(3, "1048576").parse().ok()?,
        ))
    })();
    let Some((base, copies, rate, ell)) = parsed else {
        eprintln!("usage: desk [base-size-bytes] [copies] [mutation-rate] [ell]");
        return ExitCode::from(1);
    };
    let Some(corpus) = Corpus::new(42, base, copies, rate) else {
        eprintln!("mutation rate must be in [0, 1]");
        return ExitCode::from(1);
    };
    let configs = [
        StrategyConfig::plain(),
        StrategyConfig::freq(1 << 16, 0.3).unwrap(),
        StrategyConfig::lossy(ell).unwrap(),
        StrategyConfig::block(ell).unwrap(),
    ];
    println!("corpus: base {base} bytes, {copies} copies, mutation rate {rate}");
    match desk_table(corpus.reader(), &configs) {
        Ok(rows) => {
            let _ = print_table(&rows, io::stdout().lock());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("desk: {e}");
            ExitCode::from(2)
        }
    }
}
