//! Command-line front end: argument model, subcommand drivers and exit codes.
//!
//! Exit codes: 1 for usage errors, 2 for bad input data, 3 for numerical
//! failures.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::community::{detect_communities, DetectionParams};
use crate::error::Error;
use crate::graph::{Graph, VertexSet};
use crate::io;
use crate::kernel::KernelParams;
use crate::metrics::KatzParams;
use crate::pum::{global_gbf_baseline, reference_signal, run_pipeline, PumResult, Signal, RESULT_FORMAT_VERSION};
use crate::sampling::{nested_samples, sample_vertices};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "graphpum", version, about = "Graph signal interpolation with overlapping communities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect overlapping communities and write the cover plus plot data.
    Partition(CommonArgs),
    /// Interpolate a signal from samples and report the error.
    Interpolate(CommonArgs),
    /// Run the pipeline for several nested sample counts.
    Benchmark(BenchmarkArgs),
    /// Write the synthetic reference signal of a graph.
    Signal(SignalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Edge-list file (`u v` per line, 0-based ids).
    #[arg(long)]
    pub graph: PathBuf,
    /// Signal CSV (`vertex_id,value`).
    #[arg(long, conflicts_with = "synthetic")]
    pub signal: Option<PathBuf>,
    /// Use the synthetic low-frequency reference signal.
    #[arg(long)]
    pub synthetic: bool,
    /// File with one interpolation node id per line.
    #[arg(long, conflicts_with = "n_samples")]
    pub samples: Option<PathBuf>,
    /// Number of interpolation nodes to draw.
    #[arg(long)]
    pub n_samples: Option<usize>,
    /// Seed for drawing interpolation nodes.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Kernel exponent s.
    #[arg(long, default_value_t = 2.0)]
    pub exponent: f64,
    /// Katz attenuation; defaults to min(0.5, 0.85 / max degree).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    pub small_fraction: f64,
    /// Also run the single-domain global interpolation.
    #[arg(long)]
    pub baseline: bool,
    /// Output JSON path; companion CSV files are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated, strictly ascending sample counts.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SignalArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleSource {
    File(PathBuf),
    Random { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignalSource {
    File(PathBuf),
    Synthetic,
}

/// Validated run configuration shared by the subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub graph_path: PathBuf,
    pub signal: Option<SignalSource>,
    pub samples: Option<SampleSource>,
    pub seed: u64,
    pub kernel: KernelParams,
    pub alpha: Option<f64>,
    pub small_fraction: f64,
    pub baseline: bool,
    pub out: PathBuf,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() {
            EXIT_NUMERICAL
        } else {
            EXIT_INPUT
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self, CliError> {
        let signal = match (&args.signal, args.synthetic) {
            (Some(p), false) => Some(SignalSource::File(p.clone())),
            (None, true) => Some(SignalSource::Synthetic),
            (None, false) => None,
            (Some(_), true) => return Err(CliError::usage("--signal and --synthetic are exclusive")),
        };
        let samples = match (&args.samples, args.n_samples) {
            (Some(p), None) => Some(SampleSource::File(p.clone())),
            (None, Some(count)) => Some(SampleSource::Random {
                count,
                seed: args.seed,
            }),
            (None, None) => None,
            (Some(_), Some(_)) => return Err(CliError::usage("--samples and --n-samples are exclusive")),
        };
        let kernel = KernelParams::new(args.epsilon, args.exponent)
            .map_err(|e| CliError::usage(e.to_string()))?;
        if let Some(alpha) = args.alpha {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(CliError::usage(format!("--alpha must be positive, got {alpha}")));
            }
        }
        let detection = DetectionParams {
            small_fraction: args.small_fraction,
            ..DetectionParams::default()
        };
        detection.validate().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(Self {
            graph_path: args.graph.clone(),
            signal,
            samples,
            seed: args.seed,
            kernel,
            alpha: args.alpha,
            small_fraction: args.small_fraction,
            baseline: args.baseline,
            out: args.out.clone(),
        })
    }

    pub fn detection_params(&self) -> DetectionParams {
        DetectionParams {
            small_fraction: self.small_fraction,
            katz: self.alpha.map(KatzParams::closed_form),
            ..DetectionParams::default()
        }
    }

    fn require_samples(&self) -> Result<&SampleSource, CliError> {
        self.samples
            .as_ref()
            .ok_or_else(|| CliError::usage("one of --samples or --n-samples is required"))
    }

    fn require_signal(&self) -> Result<&SignalSource, CliError> {
        self.signal
            .as_ref()
            .ok_or_else(|| CliError::usage("one of --signal or --synthetic is required"))
    }

    fn load_graph(&self) -> Result<Graph, CliError> {
        Ok(io::read_graph_file(&self.graph_path)?)
    }

    fn load_samples(&self, g: &Graph) -> Result<(VertexSet, Option<u64>), CliError> {
        match self.require_samples()? {
            SampleSource::File(p) => Ok((io::read_samples_file(p, g.vertex_count())?, None)),
            SampleSource::Random { count, seed } => {
                if *count == 0 || *count > g.vertex_count() {
                    return Err(CliError::usage(format!(
                        "--n-samples must lie in 1..={}",
                        g.vertex_count()
                    )));
                }
                Ok((sample_vertices(g.vertex_count(), *count, *seed)?, Some(*seed)))
            }
        }
    }

    fn load_signal(&self, g: &Graph) -> Result<Signal, CliError> {
        match self.require_signal()? {
            SignalSource::File(p) => Ok(io::read_signal_file(p, g.vertex_count())?),
            SignalSource::Synthetic => Ok(reference_signal(g)?),
        }
    }
}

/// `out` with its extension replaced by `suffix`, e.g. `run.json` -> `run.plot.csv`.
pub fn companion_path(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError {
            code: EXIT_INPUT,
            message: format!("cannot create {}: {e}", path.display()),
        })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut f = create(path)?;
    f.write_all(text.as_bytes())
        .and_then(|_| f.write_all(b"\n"))
        .and_then(|_| f.flush())
        .map_err(|e| CliError::from(Error::from(e)))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Partition(args) => cmd_partition(&RunConfig::from_args(args)?),
        Command::Interpolate(args) => cmd_interpolate(&RunConfig::from_args(args)?),
        Command::Benchmark(args) => cmd_benchmark(&RunConfig::from_args(&args.common)?, &args.counts),
        Command::Signal(args) => cmd_signal(&args.graph, &args.out),
    }
}

pub fn cmd_partition(cfg: &RunConfig) -> Result<(), CliError> {
    let g = cfg.load_graph()?;
    let (samples, _) = cfg.load_samples(&g)?;
    let cover = detect_communities(&g, &samples, &cfg.detection_params())?;
    write_text(&cfg.out, &cover.to_json().map_err(CliError::from)?)?;
    let plot = companion_path(&cfg.out, "plot.csv");
    let mut f = create(&plot)?;
    io::write_plot_data(&mut f, &cover)?;
    f.flush().map_err(|e| CliError::from(Error::from(e)))?;
    println!(
        "{} communities over {} vertices; cover -> {}, plot data -> {}",
        cover.len(),
        g.vertex_count(),
        cfg.out.display(),
        plot.display()
    );
    Ok(())
}

pub fn cmd_interpolate(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.require_signal()?;
    cfg.require_samples()?;
    let g = cfg.load_graph()?;
    let y = cfg.load_signal(&g)?;
    let (samples, seed) = cfg.load_samples(&g)?;
    let (cover, mut result) = run_pipeline(&g, &y, &samples, &cfg.detection_params(), &cfg.kernel)?;
    result.params.seed = seed;
    write_text(&cfg.out, &result.to_json()?)?;
    write_text(&companion_path(&cfg.out, "cover.json"), &cover.to_json()?)?;
    let csv = companion_path(&cfg.out, "vertices.csv");
    let mut f = create(&csv)?;
    io::write_approximation(&mut f, &y, result.approximant())?;
    f.flush().map_err(|e| CliError::from(Error::from(e)))?;
    println!(
        "{} communities, rrmse {:.4e}, interpolation {:.3}s, total {:.3}s",
        result.n_communities, result.rrmse, result.wall_times.interpolate_s, result.wall_times.total_s
    );
    if cfg.baseline {
        let mut base = global_gbf_baseline(&g, &y, &samples, &cfg.kernel)?;
        base.params.seed = seed;
        write_text(&companion_path(&cfg.out, "baseline.json"), &base.to_json()?)?;
        println!(
            "baseline: rrmse {:.4e}, {:.3}s",
            base.rrmse, base.wall_times.total_s
        );
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub n_samples: usize,
    pub communities: usize,
    pub rrmse: f64,
    pub time_s: f64,
    pub interpolate_time_s: f64,
    pub baseline_time_s: Option<f64>,
    pub baseline_rrmse: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub format_version: u32,
    pub params: BenchmarkParams,
    pub rows: Vec<BenchmarkRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkParams {
    pub epsilon: f64,
    pub s: f64,
    pub alpha: Option<f64>,
    pub seed: u64,
    pub small_fraction: f64,
    pub counts: Vec<usize>,
    pub baseline: bool,
}

/// One pipeline run per count on nested seeded sample sets.
pub fn benchmark(
    g: &Graph,
    y: &Signal,
    counts: &[usize],
    seed: u64,
    dp: &DetectionParams,
    kp: &KernelParams,
    baseline: bool,
) -> Result<(Vec<BenchmarkRow>, Vec<PumResult>), Error> {
    let sets = nested_samples(g.vertex_count(), counts, seed)?;
    let mut rows = Vec::with_capacity(counts.len());
    let mut results = Vec::with_capacity(counts.len());
    for samples in &sets {
        let (_, mut result) = run_pipeline(g, y, samples, dp, kp)?;
        result.params.seed = Some(seed);
        let base = if baseline {
            Some(global_gbf_baseline(g, y, samples, kp)?)
        } else {
            None
        };
        rows.push(BenchmarkRow {
            n_samples: samples.len(),
            communities: result.n_communities,
            rrmse: result.rrmse,
            time_s: result.wall_times.total_s,
            interpolate_time_s: result.wall_times.interpolate_s,
            baseline_time_s: base.as_ref().map(|b| b.wall_times.total_s),
            baseline_rrmse: base.as_ref().map(|b| b.rrmse),
        });
        results.push(result);
    }
    Ok((rows, results))
}

pub fn write_benchmark_csv<W: Write>(mut out: W, rows: &[BenchmarkRow]) -> std::io::Result<()> {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    writeln!(
        out,
        "N,communities,rrmse,time_s,interpolate_time_s,baseline_time_s,baseline_rrmse"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n_samples,
            r.communities,
            r.rrmse,
            r.time_s,
            r.interpolate_time_s,
            opt(r.baseline_time_s),
            opt(r.baseline_rrmse)
        )?;
    }
    Ok(())
}

pub fn cmd_benchmark(cfg: &RunConfig, counts: &[usize]) -> Result<(), CliError> {
    if counts.is_empty() {
        return Err(CliError::usage("--counts must list at least one sample count"));
    }
    if counts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::usage("--counts must be strictly ascending"));
    }
    if cfg.samples.is_some() {
        return Err(CliError::usage(
            "benchmark draws its own nested samples; use --counts and --seed",
        ));
    }
    cfg.require_signal()?;
    let g = cfg.load_graph()?;
    if counts.iter().any(|&c| c == 0 || c > g.vertex_count()) {
        return Err(CliError::usage(format!(
            "sample counts must lie in 1..={}",
            g.vertex_count()
        )));
    }
    let y = cfg.load_signal(&g)?;
    let dp = cfg.detection_params();
    let (rows, results) = benchmark(&g, &y, counts, cfg.seed, &dp, &cfg.kernel, cfg.baseline)?;

    let report = BenchmarkReport {
        format_version: RESULT_FORMAT_VERSION,
        params: BenchmarkParams {
            epsilon: cfg.kernel.epsilon,
            s: cfg.kernel.s,
            alpha: results.first().and_then(|r| r.params.alpha),
            seed: cfg.seed,
            small_fraction: cfg.small_fraction,
            counts: counts.to_vec(),
            baseline: cfg.baseline,
        },
        rows: rows.clone(),
    };
    write_text(
        &cfg.out,
        &serde_json::to_string_pretty(&report).map_err(|e| CliError::from(Error::from(e)))?,
    )?;
    let table = companion_path(&cfg.out, "table.csv");
    let mut f = create(&table)?;
    write_benchmark_csv(&mut f, &rows)
        .and_then(|_| f.flush())
        .map_err(|e| CliError::from(Error::from(e)))?;

    println!("{:>6} {:>12} {:>12} {:>10} {:>12}", "N", "communities", "rrmse", "time_s", "baseline_s");
    for r in &rows {
        println!(
            "{:>6} {:>12} {:>12.4e} {:>10.3} {:>12}",
            r.n_samples,
            r.communities,
            r.rrmse,
            r.time_s,
            r.baseline_time_s.map_or("-".to_string(), |t| format!("{t:.3}"))
        );
    }
    Ok(())
}

pub fn cmd_signal(graph: &Path, out: &Path) -> Result<(), CliError> {
    let g = io::read_graph_file(graph)?;
    let y = reference_signal(&g)?;
    let mut f = create(out)?;
    io::write_signal(&mut f, &y)?;
    f.flush().map_err(|e| CliError::from(Error::from(e)))?;
    Ok(())
}
