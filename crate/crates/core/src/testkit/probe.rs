// SPDX-License-Identifier: Apache-2.0

use std::io::{self, Read};

use crate::compress::{compress_observed, CompressStats};
use crate::decompress::decompress_observed;
use crate::error::Result;
use crate::observe::{Boundary, BoundaryObserver, SnapshotLog};
use crate::strategy::{StrategyConfig, DEFAULT_ALPHA};

/// Records `(bytes consumed, live rules)` after every boundary.
#[derive(Clone, Debug, Default)]
pub struct SpaceProbe {
    pub series: Vec<(u64, usize)>,
    /// Largest live count seen just before a prune.
    pub peak_before_prune: usize,
}

impl BoundaryObserver for SpaceProbe {
    fn on_boundary(&mut self, b: &Boundary<'_>) {
        self.series.push((b.length, b.dict.live_count()));
        self.peak_before_prune = self.peak_before_prune.max(b.live_before_prune);
    }
}

#[derive(Clone, Debug)]
pub struct SpaceReport {
    pub series: Vec<(u64, usize)>,
    /// Largest live count at any boundary, after pruning.
    pub peak_at_boundary: usize,
    pub peak_before_prune: usize,
    pub stats: CompressStats,
}

/// Compresses `input` into a sink and reports how the dictionary grew.
pub fn space_probe<R: Read>(input: R, config: StrategyConfig) -> Result<SpaceReport> {
    let (stats, probe) =
        compress_observed(input, config, DEFAULT_ALPHA, io::sink(), SpaceProbe::default())?;
    Ok(SpaceReport {
        peak_at_boundary: probe.series.iter().map(|s| s.1).max().unwrap_or(0),
        peak_before_prune: probe.peak_before_prune,
        series: probe.series,
        stats,
    })
}

#[derive(Clone, Debug)]
pub struct MirrorReport {
    pub container: Vec<u8>,
    pub compressor: SnapshotLog,
    pub decompressor: SnapshotLog,
    pub output: Vec<u8>,
}

impl MirrorReport {
    pub fn mirrored(&self) -> bool {
        self.compressor.snapshots == self.decompressor.snapshots
    }
}

/// Runs both directions in memory, logging snapshots on each side.
pub fn mirror_check(data: &[u8], config: StrategyConfig) -> Result<MirrorReport> {
    let mut container = Vec::new();
    let (_, compressor) =
        compress_observed(data, config, DEFAULT_ALPHA, &mut container, SnapshotLog::default())?;
    let mut output = Vec::with_capacity(data.len());
    let (_, decompressor) =
        decompress_observed(&container[..], &mut output, DEFAULT_ALPHA, SnapshotLog::default())?;
    Ok(MirrorReport {
        container,
        compressor,
        decompressor,
        output,
    })
}
