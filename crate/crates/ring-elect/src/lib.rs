//! Ring-based leader election lab.
//!
//! Two classic coordinator-election algorithms over a logical ring — the
//! unidirectional Chang-Roberts algorithm and the bidirectional Franklin
//! algorithm — implemented as pure, transport-agnostic state machines and
//! driven by two interchangeable transports:
//!
//! * [`sim`]: a deterministic discrete-event simulator with per-channel FIFO
//!   delivery and a configurable delay model. Produces a full message trace
//!   and virtual-time turnaround.
//! * [`live`]: one concurrent worker per ring position exchanging messages
//!   over in-process FIFO channels, measuring wall-clock turnaround.
//!
//! Both transports count every point-to-point send as one message-hop and
//! report [`metrics::RunMetrics`]; multi-run aggregation lives in
//! [`metrics`].

// Pure state machines for the two algorithms.
pub mod protocol;

// Ring construction, validation and ID-placement strategies.
pub mod ring;

// Deterministic discrete-event transport.
pub mod sim;

// Concurrent in-process transport.
pub mod live;

// Per-run metrics and multi-run aggregation.
pub mod metrics;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ring::ConfigError;

/// Which election algorithm a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    ChangRoberts,
    Franklin,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::ChangRoberts => "chang-roberts",
            Algorithm::Franklin => "franklin",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Which ring positions start an election, and when.
///
/// Franklin requires every node to start active, so only [`Initiators::All`]
/// is valid there. Chang-Roberts accepts any subset; non-initiators join on
/// first contact. `Staggered` delays each initiator by a per-position virtual
/// time offset (sim transport only; the benchmark default starts everyone at
/// time zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Initiators {
    All,
    Subset(BTreeSet<usize>),
    Staggered(BTreeMap<usize, u64>),
}

impl Initiators {
    /// Initiation offsets by position, in ascending position order.
    pub fn offsets(&self, n: usize) -> Vec<(usize, u64)> {
        match self {
            Initiators::All => (0..n).map(|p| (p, 0)).collect(),
            Initiators::Subset(set) => set.iter().map(|&p| (p, 0)).collect(),
            Initiators::Staggered(map) => map.iter().map(|(&p, &t)| (p, t)).collect(),
        }
    }

    pub fn validate(&self, n: usize, algorithm: Algorithm) -> Result<(), ConfigError> {
        let offsets = self.offsets(n);
        if let Some(&(bad, _)) = offsets.iter().find(|&&(p, _)| p >= n) {
            return Err(ConfigError::PositionOutOfRange { position: bad, n });
        }
        if algorithm == Algorithm::Franklin
            && (offsets.len() != n || offsets.iter().any(|&(_, t)| t != 0))
        {
            return Err(ConfigError::FranklinNeedsAllInitiators);
        }
        Ok(())
    }
}

/// Per-run options shared by both transports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    /// Circulate an explicit Coordinator announcement once the leader is
    /// decided, so every node learns the outcome.
    pub announce: bool,
    pub initiators: Initiators,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            announce: true,
            initiators: Initiators::All,
        }
    }
}

pub use crate::metrics::{RunMetrics, SummaryStats, TurnaroundUnit};
pub use crate::protocol::{Direction, NodeEvent, ProcessId, ProtocolMessage};
pub use crate::ring::{PlacementStrategy, RingConfig};
