// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use grc_core::strategy::{DEFAULT_ALPHA, DEFAULT_ELL, DEFAULT_EPS_PERCENT, DEFAULT_K};
use grc_core::testkit::Corpus;
use grc_core::{
    compress_observed, compress_seekable, decompress_observed, Error, Mode, NoObserver,
    SnapshotLog, StrategyConfig,
};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_CORRUPT: u8 = 3;
const EXIT_INTEGRITY: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "grc", version, about = "Streaming grammar compressor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compress a byte stream.
    Compress(CompressArgs),
    /// Decompress a container.
    Decompress(DecompressArgs),
    /// Decode a container and describe it.
    Stat(StatArgs),
    /// Write a noisy-repetitive DNA-like test corpus.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct CompressArgs {
    /// plain, freq, lossy or block.
    #[arg(short, long, default_value = "plain")]
    mode: Mode,
    /// Dictionary capacity (freq). Accepts K/M/G suffixes.
    #[arg(long, value_parser = parse_size)]
    k: Option<u64>,
    /// Percentage of the dictionary freed per prune (freq).
    #[arg(long)]
    eps: Option<f64>,
    /// Interval length in bytes (lossy, block). Accepts K/M/G suffixes.
    #[arg(long, value_parser = parse_size)]
    ell: Option<u64>,
    /// Load factor of the reverse dictionary, in (0, 1].
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Print a statistics record to stderr.
    #[arg(long)]
    stats: bool,
    #[arg(default_value = "-")]
    input: PathBuf,
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct DecompressArgs {
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long)]
    stats: bool,
    #[arg(default_value = "-")]
    input: PathBuf,
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct StatArgs {
    /// Also print one line per segment.
    #[arg(long)]
    segments: bool,
    #[arg(default_value = "-")]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Length of the base string. Accepts K/M/G suffixes.
    #[arg(long, value_parser = parse_size, default_value = "1M")]
    base_size: u64,
    #[arg(long, default_value_t = 1)]
    copies: u64,
    #[arg(long, default_value_t = 0.0)]
    mutation_rate: f64,
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

/// Parses a count with an optional binary K, M or G suffix.
fn parse_size(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let (digits, shift) = match s.as_bytes().last() {
        Some(b'K' | b'k') => (&s[..s.len() - 1], 10),
        Some(b'M' | b'm') => (&s[..s.len() - 1], 20),
        Some(b'G' | b'g') => (&s[..s.len() - 1], 30),
        _ => (s, 0),
    };
    let n: u64 = digits.parse().map_err(|_| format!("invalid size '{s}'"))?;
    n.checked_mul(1 << shift)
        .ok_or_else(|| format!("size '{s}' overflows"))
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Codec(Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Codec(e) => match e {
                Error::InvalidConfig(_) => EXIT_USAGE,
                Error::Read(_) | Error::Write { .. } => EXIT_IO,
                Error::IntegrityMismatch { .. } => EXIT_INTEGRITY,
                _ => EXIT_CORRUPT,
            },
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Codec(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) => f.write_str(m),
            Failure::Codec(e) => write!(f, "{e}"),
        }
    }
}

fn is_stdio(p: &Path) -> bool {
    p.as_os_str() == "-"
}

fn open_input(p: &Path) -> Result<Box<dyn Read>, Failure> {
    if is_stdio(p) {
        return Ok(Box::new(io::stdin().lock()));
    }
    let f = File::open(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
    Ok(Box::new(BufReader::with_capacity(1 << 16, f)))
}

fn create_output(p: &Path) -> Result<File, Failure> {
    File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
}

fn strategy_config(a: &CompressArgs) -> Result<StrategyConfig, Failure> {
    let reject = |flag: &str| {
        Err(Failure::Usage(format!(
            "--{flag} does not apply to mode {}",
            a.mode
        )))
    };
    let config = match a.mode {
        Mode::Plain | Mode::Lossy | Mode::Block if a.k.is_some() => return reject("k"),
        Mode::Plain | Mode::Lossy | Mode::Block if a.eps.is_some() => return reject("eps"),
        Mode::Plain | Mode::Freq if a.ell.is_some() => return reject("ell"),
        Mode::Plain => StrategyConfig::plain(),
        Mode::Freq => StrategyConfig::freq(
            a.k.unwrap_or(DEFAULT_K),
            a.eps.unwrap_or(DEFAULT_EPS_PERCENT),
        )?,
        Mode::Lossy => StrategyConfig::lossy(a.ell.unwrap_or(DEFAULT_ELL))?,
        Mode::Block => StrategyConfig::block(a.ell.unwrap_or(DEFAULT_ELL))?,
    };
    check_alpha(a.alpha)?;
    Ok(config)
}

fn check_alpha(alpha: f64) -> Result<(), Failure> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--alpha must be in (0, 1], got {alpha}")))
    }
}

struct Counted<R> {
    inner: R,
    count: u64,
}

impl<R: Read> Read for Counted<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.count += n as u64;
        Ok(n)
    }
}

struct Record {
    bytes_in: u64,
    bytes_out: u64,
    compressed: u64,
    original: u64,
    segments: u64,
    rules_created: u64,
    rules_live_peak: usize,
    seconds: f64,
}

impl Record {
    fn print(&self) {
        let cr = if self.original == 0 {
            0.0
        } else {
            100.0 * self.compressed as f64 / self.original as f64
        };
        eprintln!(
            "bytes_in={} bytes_out={} cr_percent={:.4} segments={} rules_created={} rules_live_peak={} seconds={:.3}",
            self.bytes_in,
            self.bytes_out,
            cr,
            self.segments,
            self.rules_created,
            self.rules_live_peak,
            self.seconds
        );
    }
}

fn compress(a: CompressArgs) -> Result<(), Failure> {
    let config = strategy_config(&a)?;
    let start = Instant::now();
    let input = open_input(&a.input)?;
    let stats = if is_stdio(&a.output) {
        let out = BufWriter::with_capacity(1 << 16, io::stdout().lock());
        compress_observed(input, config, a.alpha, out, NoObserver)?.0
    } else {
        let out = BufWriter::with_capacity(1 << 16, create_output(&a.output)?);
        compress_seekable(input, config, a.alpha, out)?
    };
    if a.stats {
        Record {
            bytes_in: stats.bytes_in,
            bytes_out: stats.bytes_out,
            compressed: stats.bytes_out,
            original: stats.bytes_in,
            segments: stats.segments,
            rules_created: stats.rules_created,
            rules_live_peak: stats.rules_live_peak,
            seconds: start.elapsed().as_secs_f64(),
        }
        .print();
    }
    Ok(())
}

fn decompress(a: DecompressArgs) -> Result<(), Failure> {
    check_alpha(a.alpha)?;
    let start = Instant::now();
    let mut input = Counted {
        inner: open_input(&a.input)?,
        count: 0,
    };
    let stats = if is_stdio(&a.output) {
        let out = BufWriter::with_capacity(1 << 16, io::stdout().lock());
        decompress_observed(&mut input, out, a.alpha, NoObserver)?.0
    } else {
        let out = BufWriter::with_capacity(1 << 16, create_output(&a.output)?);
        decompress_observed(&mut input, out, a.alpha, NoObserver)?.0
    };
    if a.stats {
        Record {
            bytes_in: input.count,
            bytes_out: stats.bytes_out,
            compressed: input.count,
            original: stats.bytes_out,
            segments: stats.segments,
            rules_created: stats.rules_created,
            rules_live_peak: stats.rules_live_peak,
            seconds: start.elapsed().as_secs_f64(),
        }
        .print();
    }
    Ok(())
}

fn stat(a: StatArgs) -> Result<(), Failure> {
    let mut input = Counted {
        inner: open_input(&a.input)?,
        count: 0,
    };
    let (stats, log) = decompress_observed(&mut input, io::sink(), DEFAULT_ALPHA, SnapshotLog::default())?;
    let c = stats.header.config;
    let mut out = io::stdout().lock();
    let structure: u64 = log.accounts.iter().map(|s| s.structure_bits).sum();
    let labels: u64 = log.accounts.iter().map(|s| s.label_bits).sum();
    let w = |r: io::Result<()>| r.map_err(|e| Failure::Io(format!("stdout: {e}")));
    w(writeln!(
        out,
        "mode={} k={} eps={} ell={} original_length={} container_bytes={} decoded_length={} segments={} rules_created={} rules_live_peak={} structure_bits={} label_bits={}",
        c.mode,
        c.k,
        c.eps_percent(),
        c.ell,
        stats.header.original_length,
        input.count,
        stats.bytes_out,
        stats.segments,
        stats.rules_created,
        stats.rules_live_peak,
        structure,
        labels
    ))?;
    if a.segments {
        for (s, acc) in log.snapshots.iter().zip(&log.accounts) {
            w(writeln!(
                out,
                "segment={} length={} internal={} leaves={} structure_bits={} label_bits={} live={}",
                s.segment, s.length, acc.internal, acc.leaves, acc.structure_bits, acc.label_bits, s.live
            ))?;
        }
    }
    Ok(())
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    let corpus = Corpus::new(a.seed, a.base_size as usize, a.copies as usize, a.mutation_rate)
        .ok_or_else(|| Failure::Usage(format!("--mutation-rate must be in [0, 1], got {}", a.mutation_rate)))?;
    let result = if is_stdio(&a.output) {
        corpus.write_to(BufWriter::with_capacity(1 << 16, io::stdout().lock()))
    } else {
        corpus.write_to(BufWriter::with_capacity(1 << 16, create_output(&a.output)?))
    };
    result.map_err(|e| Failure::Io(format!("{}: {e}", a.output.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Compress(a) => compress(a),
        Command::Decompress(a) => decompress(a),
        Command::Stat(a) => stat(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("grc: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
