// SPDX-License-Identifier: Apache-2.0

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use grc_core::testkit::{random_bytes, Corpus};
use grc_core::{compress_stream, compress_to_vec, decompress_to_vec, StrategyConfig};
use std::io;

fn configs() -> [(&'static str, StrategyConfig); 4] {
    [
        ("plain", StrategyConfig::plain()),
        ("freq", StrategyConfig::freq(1 << 14, 0.3).unwrap()),
        ("lossy", StrategyConfig::lossy(1 << 18).unwrap()),
        ("block", StrategyConfig::block(1 << 18).unwrap()),
    ]
}

fn compress(c: &mut Criterion) {
    let noisy = Corpus::new(1, 1 << 18, 8, 0.01).unwrap().to_vec();
    let random = random_bytes(1 << 20, 2);
    let mut g = c.benchmark_group("compress");
    g.sample_size(10);
    for (corpus, data) in [("noisy", &noisy), ("random", &random)] {
        g.throughput(Throughput::Bytes(data.len() as u64));
        for (name, config) in configs() {
            g.bench_with_input(BenchmarkId::new(name, corpus), data, |b, d| {
                b.iter(|| compress_stream(black_box(&d[..]), config, io::sink()).unwrap())
            });
        }
    }
    g.finish();
}

fn decompress(c: &mut Criterion) {
    let noisy = Corpus::new(1, 1 << 18, 8, 0.01).unwrap().to_vec();
    let mut g = c.benchmark_group("decompress");
    g.sample_size(10);
    g.throughput(Throughput::Bytes(noisy.len() as u64));
    for (name, config) in configs() {
        let packed = compress_to_vec(&noisy, config).unwrap();
        g.bench_with_input(BenchmarkId::new(name, "noisy"), &packed, |b, p| {
            b.iter(|| decompress_to_vec(black_box(p)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, compress, decompress);
criterion_main!(benches);
