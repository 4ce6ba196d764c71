//! Benchmark runner: R elections of either algorithm on either transport,
//! per-run rows plus min/max/mean/stddev, in table, CSV or JSON form.
//!
//! Run `i` of a batch uses seed `base_seed + i`, so placements vary across
//! runs while the whole batch stays reproducible. On the sim transport the
//! output bytes are a pure function of the flags.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use ring_elect::live::{run_live, LiveError, DEFAULT_TIMEOUT};
use ring_elect::metrics::{aggregate, emit, OutputFormat, RunMetrics, TurnaroundUnit};
use ring_elect::ring::{build_ring, ConfigError, PlacementStrategy};
use ring_elect::sim::{run_election, DelayModel, SimError};
use ring_elect::{Algorithm, Initiators, RunOptions};

/// Decorrelates the per-link delay stream from the placement stream while
/// keeping both derived from the run seed.
const DELAY_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

const DEFAULT_BASE_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    ChangRoberts,
    Franklin,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(arg: AlgorithmArg) -> Self {
        match arg {
            AlgorithmArg::ChangRoberts => Algorithm::ChangRoberts,
            AlgorithmArg::Franklin => Algorithm::Franklin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransportArg {
    /// Deterministic discrete-event simulation (virtual time).
    Sim,
    /// Concurrent in-process workers (wall-clock time).
    Live,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Table,
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Table => OutputFormat::Table,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DelayArg {
    Constant,
    Uniform { min: u64, max: u64 },
}

fn parse_delay(s: &str) -> Result<DelayArg, String> {
    if s == "constant" {
        return Ok(DelayArg::Constant);
    }
    if let Some(rest) = s.strip_prefix("uniform:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 2 {
            return Err("expected uniform:<min>:<max>".into());
        }
        let min: u64 = parts[0].parse().map_err(|_| "min must be an integer")?;
        let max: u64 = parts[1].parse().map_err(|_| "max must be an integer")?;
        if min == 0 || min > max {
            return Err("uniform delays need 0 < min <= max".into());
        }
        return Ok(DelayArg::Uniform { min, max });
    }
    Err(format!(
        "unknown delay model `{s}` (use `constant` or `uniform:<min>:<max>`)"
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlacementArg {
    Random,
    CrWorst,
    CrBest,
    Explicit(Vec<u64>),
}

fn parse_placement(s: &str) -> Result<PlacementArg, String> {
    match s {
        "random" => return Ok(PlacementArg::Random),
        "cr-worst" => return Ok(PlacementArg::CrWorst),
        "cr-best" => return Ok(PlacementArg::CrBest),
        _ => {}
    }
    if let Some(list) = s.strip_prefix("explicit:") {
        let ids = list
            .split(',')
            .map(|id| id.trim().parse::<u64>())
            .collect::<Result<Vec<u64>, _>>()
            .map_err(|_| "explicit ids must be comma-separated integers".to_string())?;
        if ids.is_empty() {
            return Err("explicit placement needs at least one id".into());
        }
        return Ok(PlacementArg::Explicit(ids));
    }
    Err(format!(
        "unknown placement `{s}` (use `random`, `cr-worst`, `cr-best` or `explicit:<ids>`)"
    ))
}

fn parse_positions(s: &str) -> Result<BTreeSet<usize>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("initiator position `{p}` is not an integer"))
        })
        .collect()
}

/// One benchmark batch: everything the CLI accepts.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "ring-elect",
    version,
    about = "Benchmark Chang-Roberts and Franklin leader election on a logical ring"
)]
pub struct BenchSpec {
    /// Election algorithm to run.
    #[arg(long, value_enum)]
    pub algorithm: AlgorithmArg,

    /// Ring size (number of processes).
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,

    /// Number of repeated runs.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,

    /// Base seed; run i uses seed + i.
    #[arg(long, env = "RING_ELECT_SEED", default_value_t = DEFAULT_BASE_SEED)]
    pub seed: u64,

    /// Where the elections execute.
    #[arg(long, value_enum, default_value_t = TransportArg::Sim)]
    pub transport: TransportArg,

    /// One-way channel delay for the constant model, in virtual units.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub delta: u64,

    /// Channel delay model: constant or uniform:<min>:<max>.
    #[arg(long, default_value = "constant", value_parser = parse_delay)]
    pub delay: DelayArg,

    /// ID placement: random, cr-worst, cr-best or explicit:<ids>.
    #[arg(long, default_value = "random", value_parser = parse_placement)]
    pub placement: PlacementArg,

    /// Skip the coordinator announcement round.
    #[arg(long)]
    pub no_announce: bool,

    /// Comma-separated initiating positions (chang-roberts only).
    #[arg(long, value_parser = parse_positions)]
    pub initiators: Option<BTreeSet<usize>>,

    /// Output encoding.
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    pub format: FormatArg,

    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Dump the sim trace of run 0 (line-delimited JSON).
    #[arg(long)]
    pub trace: Option<PathBuf>,

    /// Run up to this many elections concurrently.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub parallel_runs: u64,
}

#[derive(Debug)]
pub enum BenchError {
    /// Bad flag combination or configuration: exit 2.
    Usage(String),
    /// Protocol violation, liveness failure or I/O problem: exit 1.
    /// Carries the failing run's partial trace when the sim produced one.
    Run {
        message: String,
        trace: Option<String>,
    },
}

impl BenchError {
    fn run(message: impl Into<String>) -> Self {
        BenchError::Run {
            message: message.into(),
            trace: None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            BenchError::Usage(_) => 2,
            BenchError::Run { .. } => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            BenchError::Usage(message) => message,
            BenchError::Run { message, .. } => message,
        }
    }
}

impl std::fmt::Display for BenchError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for BenchError {}

/// The rendered report plus run 0's trace when requested.
pub struct BenchOutput {
    pub rendered: String,
    pub trace_ldjson: Option<String>,
}

/// Execute the batch and render the report. Pure given the spec when the
/// transport is sim.
pub fn run_bench(spec: &BenchSpec) -> Result<BenchOutput, BenchError> {
    let algorithm: Algorithm = spec.algorithm.into();
    let n = spec.n as usize;

    if spec.initiators.is_some() && algorithm == Algorithm::Franklin {
        return Err(BenchError::Usage(
            "--initiators applies to chang-roberts only".into(),
        ));
    }
    if spec.trace.is_some() && spec.transport == TransportArg::Live {
        return Err(BenchError::Usage("--trace requires --transport sim".into()));
    }
    let initiators = match &spec.initiators {
        Some(positions) => {
            if positions.is_empty() {
                return Err(BenchError::Usage("--initiators must not be empty".into()));
            }
            if let Some(&bad) = positions.iter().find(|&&p| p >= n) {
                return Err(BenchError::Usage(format!(
                    "initiator position {bad} out of range for --n {n}"
                )));
            }
            Initiators::Subset(positions.clone())
        }
        None => Initiators::All,
    };
    let options = RunOptions {
        announce: !spec.no_announce,
        initiators,
    };
    let strategy = match &spec.placement {
        PlacementArg::Random => PlacementStrategy::Random,
        PlacementArg::CrWorst => PlacementStrategy::CrWorst,
        PlacementArg::CrBest => PlacementStrategy::CrBest,
        PlacementArg::Explicit(ids) => PlacementStrategy::Explicit(ids.clone()),
    };

    let run_one = |index: u64| -> Result<(RunMetrics, Option<String>), BenchError> {
        let seed = spec.seed.wrapping_add(index);
        let cfg = build_ring(n, &strategy, seed).map_err(usage_from_config)?;
        match spec.transport {
            TransportArg::Sim => {
                let delay = match spec.delay {
                    DelayArg::Constant => DelayModel::Constant { delta: spec.delta },
                    DelayArg::Uniform { min, max } => DelayModel::UniformPerLink {
                        min,
                        max,
                        seed: seed ^ DELAY_SEED_SALT,
                    },
                };
                let report = run_election(&cfg, algorithm, &delay, &options)
                    .map_err(|e| sim_error(index, e))?;
                let trace =
                    (index == 0 && spec.trace.is_some()).then(|| report.trace.to_ldjson());
                Ok((report.metrics, trace))
            }
            TransportArg::Live => {
                let report = run_live(&cfg, algorithm, &options, DEFAULT_TIMEOUT)
                    .map_err(|e| live_error(index, e))?;
                let metrics = RunMetrics {
                    algorithm,
                    n,
                    seed,
                    strategy: cfg.strategy().to_string(),
                    election_hops: report.election_hops,
                    announcement_hops: report.announcement_hops,
                    rounds: report.rounds,
                    turnaround: report.turnaround_ns,
                    turnaround_unit: TurnaroundUnit::Nanoseconds,
                };
                Ok((metrics, None))
            }
        }
    };

    let outcomes = run_batch(spec.runs, spec.parallel_runs, run_one)?;
    let mut trace_ldjson = None;
    let mut runs = Vec::with_capacity(outcomes.len());
    for (metrics, trace) in outcomes {
        trace_ldjson = trace_ldjson.or(trace);
        runs.push(metrics);
    }

    let stats = aggregate(&runs).map_err(|e| BenchError::run(e.to_string()))?;
    let rendered =
        emit(&stats, &runs, spec.format.into()).map_err(|e| BenchError::run(e.to_string()))?;
    Ok(BenchOutput {
        rendered,
        trace_ldjson,
    })
}

/// Run jobs 0..runs, at most `width` at a time, collecting in index order.
fn run_batch<T: Send>(
    runs: u64,
    width: u64,
    job: impl Fn(u64) -> Result<T, BenchError> + Sync,
) -> Result<Vec<T>, BenchError> {
    if width <= 1 {
        return (0..runs).map(job).collect();
    }
    let mut results: Vec<Option<Result<T, BenchError>>> = Vec::new();
    results.resize_with(runs as usize, || None);
    for (chunk_index, chunk) in results.chunks_mut(width as usize).enumerate() {
        let base = chunk_index as u64 * width;
        std::thread::scope(|scope| {
            for (offset, slot) in chunk.iter_mut().enumerate() {
                let job = &job;
                scope.spawn(move || {
                    *slot = Some(job(base + offset as u64));
                });
            }
        });
    }
    results
        .into_iter()
        .map(|slot| slot.expect("every run executed"))
        .collect()
}

fn usage_from_config(err: ConfigError) -> BenchError {
    BenchError::Usage(err.to_string())
}

fn sim_error(run: u64, err: SimError) -> BenchError {
    let trace = err.trace().map(|t| t.to_ldjson());
    match err {
        SimError::Config(e) => usage_from_config(e),
        other => BenchError::Run {
            message: format!("run {run}: {other}"),
            trace,
        },
    }
}

fn live_error(run: u64, err: LiveError) -> BenchError {
    match err {
        LiveError::Config(e) => usage_from_config(e),
        other => BenchError::run(format!("run {run}: {other}")),
    }
}

/// Run the batch and write the report (and trace) where the spec says.
pub fn execute(spec: &BenchSpec, stdout: &mut impl Write) -> Result<(), BenchError> {
    let write_trace = |ldjson: &str| -> Result<(), BenchError> {
        let path = spec.trace.as_ref().expect("trace path checked");
        fs::write(path, ldjson)
            .map_err(|e| BenchError::run(format!("writing {}: {e}", path.display())))
    };

    match run_bench(spec) {
        Ok(output) => {
            if let Some(ldjson) = &output.trace_ldjson {
                write_trace(ldjson)?;
            }
            match &spec.out {
                Some(path) => fs::write(path, &output.rendered)
                    .map_err(|e| BenchError::run(format!("writing {}: {e}", path.display())))?,
                None => stdout
                    .write_all(output.rendered.as_bytes())
                    .map_err(|e| BenchError::run(format!("writing report: {e}")))?,
            }
            Ok(())
        }
        Err(BenchError::Run {
            message,
            trace: Some(ldjson),
        }) if spec.trace.is_some() => {
            // Failed runs still leave their partial trace behind.
            write_trace(&ldjson)?;
            let path = spec.trace.as_ref().expect("trace path checked");
            Err(BenchError::run(format!(
                "{message} (partial trace written to {})",
                path.display()
            )))
        }
        Err(BenchError::Run { message, trace: _ }) => Err(BenchError::run(format!(
            "{message} (rerun with --trace <path> for the delivery log)"
        ))),
        Err(usage) => Err(usage),
    }
}
