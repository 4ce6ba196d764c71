//! Per-run metric records, multi-run aggregation and emission.
//!
//! Aggregation works on exact integer moments (u128 sums), so `aggregate`
//! is bit-for-bit permutation-invariant and emissions are byte-stable for
//! identical inputs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Algorithm;

/// What the turnaround figure is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TurnaroundUnit {
    /// Virtual time units of the sim transport. Under `Constant { delta }`
    /// every hop costs `delta` units, so with the default delta of 1 the
    /// value is directly the hop-delay multiple.
    #[serde(rename = "delta")]
    Delta,
    /// Wall-clock nanoseconds of the live transport.
    #[serde(rename = "ns")]
    Nanoseconds,
}

impl TurnaroundUnit {
    pub fn label(self) -> &'static str {
        match self {
            TurnaroundUnit::Delta => "delta",
            TurnaroundUnit::Nanoseconds => "ns",
        }
    }
}

/// Counters for a single election run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub algorithm: Algorithm,
    pub n: usize,
    pub seed: u64,
    pub strategy: String,
    /// Sends of election traffic (tokens), including passive forwards.
    pub election_hops: u64,
    /// Sends of the Coordinator announcement, including relays.
    pub announcement_hops: u64,
    /// Franklin: the winner's final round number. Absent for Chang-Roberts.
    pub rounds: Option<u32>,
    pub turnaround: u64,
    pub turnaround_unit: TurnaroundUnit,
}

impl RunMetrics {
    pub fn total_hops(&self) -> u64 {
        self.election_hops + self.announcement_hops
    }
}

/// min/max/mean/sample-stddev of one metric across runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub min: u64,
    pub max: u64,
    pub mean: f64,
    pub stddev: f64,
}

/// Aggregate statistics over R runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub run_count: usize,
    pub election_hops: MetricSummary,
    pub announcement_hops: MetricSummary,
    pub total_hops: MetricSummary,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rounds: Option<MetricSummary>,
    pub turnaround: MetricSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("no runs to aggregate")]
    EmptyRuns,
    #[error("runs are not homogeneous: {0}")]
    Mixed(String),
}

/// Aggregate a homogeneous batch of runs.
pub fn aggregate(runs: &[RunMetrics]) -> Result<SummaryStats, StatsError> {
    let first = runs.first().ok_or(StatsError::EmptyRuns)?;
    for run in runs {
        if run.algorithm != first.algorithm {
            return Err(StatsError::Mixed("algorithms differ".into()));
        }
        if run.n != first.n {
            return Err(StatsError::Mixed("ring sizes differ".into()));
        }
        if run.turnaround_unit != first.turnaround_unit {
            return Err(StatsError::Mixed("turnaround units differ".into()));
        }
        if run.rounds.is_some() != first.rounds.is_some() {
            return Err(StatsError::Mixed("round counts partially present".into()));
        }
    }

    let column = |f: fn(&RunMetrics) -> u64| summarize(runs.iter().map(f));
    Ok(SummaryStats {
        run_count: runs.len(),
        election_hops: column(|r| r.election_hops),
        announcement_hops: column(|r| r.announcement_hops),
        total_hops: column(|r| r.total_hops()),
        rounds: first
            .rounds
            .map(|_| summarize(runs.iter().map(|r| u64::from(r.rounds.unwrap_or(0))))),
        turnaround: column(|r| r.turnaround),
    })
}

fn summarize(values: impl Iterator<Item = u64>) -> MetricSummary {
    let mut min = u64::MAX;
    let mut max = 0u64;
    let mut count: u128 = 0;
    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;
    for v in values {
        min = min.min(v);
        max = max.max(v);
        count += 1;
        sum += v as u128;
        sum_sq += (v as u128) * (v as u128);
    }
    let mean = sum as f64 / count as f64;
    // Sample variance from exact integer moments:
    // (R * sum(x^2) - sum(x)^2) / (R * (R - 1)).
    let stddev = if count > 1 {
        let numerator = count * sum_sq - sum * sum;
        (numerator as f64 / (count * (count - 1)) as f64).sqrt()
    } else {
        0.0
    };
    MetricSummary {
        min,
        max,
        mean,
        stddev,
    }
}

/// Output encodings for run rows plus the summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

pub const CSV_HEADER: &str = "run,algorithm,n,seed,strategy,election_hops,announcement_hops,\
total_hops,rounds,turnaround,turnaround_unit";

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Render per-run rows plus summary statistics in the requested format.
pub fn emit(
    stats: &SummaryStats,
    runs: &[RunMetrics],
    format: OutputFormat,
) -> Result<String, StatsError> {
    if runs.is_empty() {
        return Err(StatsError::EmptyRuns);
    }
    if runs.len() != stats.run_count {
        return Err(StatsError::Mixed(format!(
            "summary covers {} runs, {} rows given",
            stats.run_count,
            runs.len()
        )));
    }
    Ok(match format {
        OutputFormat::Csv => emit_csv(stats, runs),
        OutputFormat::Json => emit_json(stats, runs),
        OutputFormat::Table => emit_table(stats, runs),
    })
}

fn opt_rounds(rounds: Option<u32>) -> String {
    rounds.map(|r| r.to_string()).unwrap_or_default()
}

fn emit_csv(stats: &SummaryStats, runs: &[RunMetrics]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, run) in runs.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            i,
            run.algorithm,
            run.n,
            run.seed,
            run.strategy,
            run.election_hops,
            run.announcement_hops,
            run.total_hops(),
            opt_rounds(run.rounds),
            run.turnaround,
            run.turnaround_unit.label(),
        ));
    }
    let head = runs.first().expect("validated non-empty");
    let summary_row = |name: &str, pick: &dyn Fn(&MetricSummary) -> String| {
        format!(
            "{},{},{},,,{},{},{},{},{},{}\n",
            name,
            head.algorithm,
            head.n,
            pick(&stats.election_hops),
            pick(&stats.announcement_hops),
            pick(&stats.total_hops),
            stats.rounds.as_ref().map(pick).unwrap_or_default(),
            pick(&stats.turnaround),
            head.turnaround_unit.label(),
        )
    };
    out.push_str(&summary_row("min", &|m| m.min.to_string()));
    out.push_str(&summary_row("max", &|m| m.max.to_string()));
    out.push_str(&summary_row("mean", &|m| m.mean.to_string()));
    out.push_str(&summary_row("stddev", &|m| m.stddev.to_string()));
    out
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct JsonReport {
    schema_version: u32,
    algorithm: Algorithm,
    n: usize,
    turnaround_unit: TurnaroundUnit,
    runs: Vec<JsonRun>,
    summary: SummaryStats,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct JsonRun {
    run: usize,
    seed: u64,
    strategy: String,
    election_hops: u64,
    announcement_hops: u64,
    total_hops: u64,
    rounds: Option<u32>,
    turnaround: u64,
}

fn emit_json(stats: &SummaryStats, runs: &[RunMetrics]) -> String {
    let head = runs.first().expect("validated non-empty");
    let report = JsonReport {
        schema_version: REPORT_SCHEMA_VERSION,
        algorithm: head.algorithm,
        n: head.n,
        turnaround_unit: head.turnaround_unit,
        runs: runs
            .iter()
            .enumerate()
            .map(|(i, r)| JsonRun {
                run: i,
                seed: r.seed,
                strategy: r.strategy.clone(),
                election_hops: r.election_hops,
                announcement_hops: r.announcement_hops,
                total_hops: r.total_hops(),
                rounds: r.rounds,
                turnaround: r.turnaround,
            })
            .collect(),
        summary: stats.clone(),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    text
}

fn emit_table(stats: &SummaryStats, runs: &[RunMetrics]) -> String {
    let head = runs.first().expect("validated non-empty");
    let turnaround_col = format!("turnaround ({})", head.turnaround_unit.label());
    let headers = [
        "run",
        "algorithm",
        "n",
        "seed",
        "strategy",
        "election",
        "announce",
        "total",
        "rounds",
        turnaround_col.as_str(),
    ];

    let mut rows: Vec<Vec<String>> = Vec::with_capacity(runs.len() + 4);
    for (i, r) in runs.iter().enumerate() {
        rows.push(vec![
            i.to_string(),
            r.algorithm.to_string(),
            r.n.to_string(),
            r.seed.to_string(),
            r.strategy.clone(),
            r.election_hops.to_string(),
            r.announcement_hops.to_string(),
            r.total_hops().to_string(),
            opt_rounds(r.rounds),
            r.turnaround.to_string(),
        ]);
    }
    let summary_row = |name: &str, pick: &dyn Fn(&MetricSummary) -> String| {
        vec![
            name.to_string(),
            head.algorithm.to_string(),
            head.n.to_string(),
            String::new(),
            String::new(),
            pick(&stats.election_hops),
            pick(&stats.announcement_hops),
            pick(&stats.total_hops),
            stats.rounds.as_ref().map(pick).unwrap_or_default(),
            pick(&stats.turnaround),
        ]
    };
    rows.push(summary_row("min", &|m| m.min.to_string()));
    rows.push(summary_row("max", &|m| m.max.to_string()));
    rows.push(summary_row("mean", &|m| format!("{:.2}", m.mean)));
    rows.push(summary_row("stddev", &|m| format!("{:.2}", m.stddev)));

    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }

    let mut out = String::new();
    let render = |cells: &[String], widths: &[usize], out: &mut String| {
        let line = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        out.push_str(line.trim_end());
        out.push('\n');
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    render(&header_cells, &widths, &mut out);
    for (i, row) in rows.iter().enumerate() {
        if i == runs.len() {
            out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
            out.push('\n');
        }
        render(row, &widths, &mut out);
    }
    out
}
