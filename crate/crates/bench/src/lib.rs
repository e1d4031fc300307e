// SPDX-License-Identifier: Apache-2.0

//! Desk-scale comparison runs: each mode over one corpus, with size, rule
//! counts and timings.

use std::io::{self, Read};
use std::time::{Duration, Instant};

use grc_core::{compress_stream, decompress_stream, Result, StrategyConfig};

#[derive(Clone, Debug)]
pub struct Row {
    pub config: StrategyConfig,
    pub bytes_in: u64,
    pub bytes_out: u64,
    pub segments: u64,
    pub rules_created: u64,
    pub rules_live_peak: usize,
    pub compress: Duration,
    pub decompress: Duration,
}

impl Row {
    pub fn ratio_percent(&self) -> f64 {
        if self.bytes_in == 0 {
            0.0
        } else {
            100.0 * self.bytes_out as f64 / self.bytes_in as f64
        }
    }

    pub fn label(&self) -> String {
        let c = &self.config;
        match c.mode {
            grc_core::Mode::Plain => "plain".into(),
            grc_core::Mode::Freq => format!("freq k={} eps={}", c.k, c.eps_percent()),
            m => format!("{m} ell={}", c.ell),
        }
    }
}

/// Compresses and decompresses `data` under `config`, checking the
/// roundtrip.
pub fn measure(data: &[u8], config: StrategyConfig) -> Result<Row> {
    let mut container = Vec::new();
    let start = Instant::now();
    let stats = compress_stream(data, config, &mut container)?;
    let compress = start.elapsed();
    let mut out = Vec::with_capacity(data.len());
    let start = Instant::now();
    decompress_stream(&container[..], &mut out)?;
    let decompress = start.elapsed();
    assert!(out == data, "roundtrip mismatch under {config:?}");
    Ok(Row {
        config,
        bytes_in: stats.bytes_in,
        bytes_out: stats.bytes_out,
        segments: stats.segments,
        rules_created: stats.rules_created,
        rules_live_peak: stats.rules_live_peak,
        compress,
        decompress,
    })
}

/// Reads all of `input` and measures it under each configuration.
pub fn desk_table<R: Read>(mut input: R, configs: &[StrategyConfig]) -> Result<Vec<Row>> {
    let mut data = Vec::new();
    input.read_to_end(&mut data).map_err(grc_core::Error::Read)?;
    configs.iter().map(|&c| measure(&data, c)).collect()
}

pub fn print_table<W: io::Write>(rows: &[Row], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "{:<24} {:>12} {:>8} {:>9} {:>11} {:>10} {:>9} {:>9}",
        "mode", "bytes_out", "cr%", "segments", "rules", "live_peak", "comp MB/s", "dec MB/s"
    )?;
    for r in rows {
        let mbps = |d: Duration| r.bytes_in as f64 / 1e6 / d.as_secs_f64().max(1e-9);
        writeln!(
            out,
            "{:<24} {:>12} {:>8.2} {:>9} {:>11} {:>10} {:>9.1} {:>9.1}",
            r.label(),
            r.bytes_out,
            r.ratio_percent(),
            r.segments,
            r.rules_created,
            r.rules_live_peak,
            mbps(r.compress),
            mbps(r.decompress)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let data = b"to be or not to be, that is the question. ".repeat(200);
        let configs = [
            StrategyConfig::plain(),
            StrategyConfig::freq(64, 10.0).unwrap(),
            StrategyConfig::lossy(512).unwrap(),
            StrategyConfig::block(512).unwrap(),
        ];
        let rows = desk_table(&data[..], &configs).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.bytes_in == data.len() as u64));
        assert!(rows[0].ratio_percent() < 50.0);
        let mut text = Vec::new();
        print_table(&rows, &mut text).unwrap();
        assert_eq!(String::from_utf8(text).unwrap().lines().count(), 5);
    }
}
