//! Deterministic discrete-event transport.
//!
//! Messages travel over directed FIFO channels, one per (position,
//! direction) pair; each channel has a fixed delay drawn from the
//! [`DelayModel`] at setup, so per-channel FIFO order holds by
//! construction. Deliveries are processed in `(time, sequence)` order with
//! a global monotone sequence number breaking ties, which makes a run a
//! pure function of its inputs: identical `(ring, algorithm, delay,
//! options)` produce byte-identical traces and metrics.
//!
//! A run drives the node state machines until the event queue drains, then
//! asserts the outcome: exactly one node became leader, it carries the
//! maximum ID, and (with announcements on) every other node learned it.
//! The degenerate one-node ring elects itself immediately with zero
//! messages; self-delivery channels are not modeled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::metrics::{RunMetrics, TurnaroundUnit};
use crate::protocol::{
    CrNodeState, Direction, FrNodeState, NodeEvent, NodeSm, ProcessId, ProtocolMessage,
    ProtocolViolation,
};
use crate::ring::{seeded_rng, uniform_below, ConfigError, RingConfig};
use crate::{Algorithm, RunOptions};

/// Per-channel one-way delay, in virtual time units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum DelayModel {
    /// Every channel delivers after `delta` units.
    Constant { delta: u64 },
    /// Each directed channel draws one fixed delay from `[min, max]` at
    /// setup. Per-message jitter would break FIFO and is not modeled.
    UniformPerLink { min: u64, max: u64, seed: u64 },
}

impl DelayModel {
    fn validate(&self) -> Result<(), SimError> {
        let ok = match *self {
            DelayModel::Constant { delta } => delta > 0,
            DelayModel::UniformPerLink { min, max, .. } => min > 0 && min <= max,
        };
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidDelay { model: self.clone() })
        }
    }

    /// Delay table indexed by `[from_position][direction]`.
    fn link_delays(&self, n: usize) -> Vec<[u64; 2]> {
        match *self {
            DelayModel::Constant { delta } => vec![[delta, delta]; n],
            DelayModel::UniformPerLink { min, max, seed } => {
                let mut rng = seeded_rng(seed);
                let span = max - min + 1;
                (0..n)
                    .map(|_| {
                        [
                            min + uniform_below(&mut rng, span),
                            min + uniform_below(&mut rng, span),
                        ]
                    })
                    .collect()
            }
        }
    }
}

/// One delivery: a message crossing a directed channel, and what the
/// receiving node did with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub t: u64,
    pub from: usize,
    pub to: usize,
    pub message: ProtocolMessage,
    pub events: Vec<NodeEvent>,
}

/// Run context, written as the first line of an exported trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceHeader {
    pub schema: &'static str,
    pub version: u32,
    pub algorithm: Algorithm,
    pub n: usize,
    pub placement: Vec<u64>,
    pub seed: u64,
    pub strategy: String,
    pub delay: DelayModel,
    pub announce: bool,
}

pub const TRACE_SCHEMA: &str = "ring-elect/trace";
pub const TRACE_SCHEMA_VERSION: u32 = 1;

/// Complete delivery log of a run. Byte-identical for identical inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub records: Vec<TraceRecord>,
}

#[derive(Serialize)]
struct RecordLine<'a> {
    t: u64,
    from: usize,
    to: usize,
    kind: &'static str,
    payload: serde_json::Value,
    events: &'a [NodeEvent],
}

impl Trace {
    /// Line-delimited JSON: one header line, then one line per delivery
    /// (`{ t, from, to, kind, payload, events }`).
    pub fn to_ldjson(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for record in &self.records {
            let (kind, payload) = message_parts(&record.message);
            let line = RecordLine {
                t: record.t,
                from: record.from,
                to: record.to,
                kind,
                payload,
                events: &record.events,
            };
            out.push_str(&serde_json::to_string(&line).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

fn message_parts(msg: &ProtocolMessage) -> (&'static str, serde_json::Value) {
    match *msg {
        ProtocolMessage::CrElection { candidate } => (
            "cr_election",
            serde_json::json!({ "candidate": candidate }),
        ),
        ProtocolMessage::FrToken {
            origin,
            round,
            direction,
        } => (
            "fr_token",
            serde_json::json!({ "origin": origin, "round": round, "direction": direction }),
        ),
        ProtocolMessage::Coordinator { leader } => {
            ("coordinator", serde_json::json!({ "leader": leader }))
        }
    }
}

/// Outcome of a simulated election.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub metrics: RunMetrics,
    pub trace: Trace,
    pub leader: ProcessId,
    pub leader_position: usize,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid delay model {model:?}: delays must be positive and min <= max")]
    InvalidDelay { model: DelayModel },
    #[error("protocol violation at position {position}, t={time}: {violation}")]
    Violation {
        position: usize,
        time: u64,
        violation: ProtocolViolation,
        trace: Box<Trace>,
    },
    #[error("quiescence without an elected leader")]
    NoLeader { trace: Box<Trace> },
    #[error("safety check failed: {detail}")]
    Safety { detail: String, trace: Box<Trace> },
}

impl SimError {
    /// The delivery log up to the failure, when one exists.
    pub fn trace(&self) -> Option<&Trace> {
        match self {
            SimError::Violation { trace, .. }
            | SimError::NoLeader { trace }
            | SimError::Safety { trace, .. } => Some(trace),
            _ => None,
        }
    }
}

/// Run one election to quiescence and report metrics plus the full trace.
pub fn run_election(
    cfg: &RingConfig,
    algorithm: Algorithm,
    delay: &DelayModel,
    options: &RunOptions,
) -> Result<SimReport, SimError> {
    delay.validate()?;
    options.initiators.validate(cfg.n(), algorithm)?;

    let header = TraceHeader {
        schema: TRACE_SCHEMA,
        version: TRACE_SCHEMA_VERSION,
        algorithm,
        n: cfg.n(),
        placement: cfg.placement().iter().map(|id| id.value()).collect(),
        seed: cfg.seed(),
        strategy: cfg.strategy().to_string(),
        delay: delay.clone(),
        announce: options.announce,
    };

    if cfg.n() == 1 {
        // Degenerate ring: the only node is the coordinator, no messages.
        let leader = cfg.id_at(0);
        return Ok(SimReport {
            metrics: run_metrics(cfg, algorithm, 0, 0, franklin_rounds(algorithm, 0), 0),
            trace: Trace {
                header,
                records: Vec::new(),
            },
            leader,
            leader_position: 0,
        });
    }

    Simulation::new(cfg, algorithm, delay, options, header).run()
}

fn franklin_rounds(algorithm: Algorithm, rounds: u32) -> Option<u32> {
    match algorithm {
        Algorithm::Franklin => Some(rounds),
        Algorithm::ChangRoberts => None,
    }
}

fn run_metrics(
    cfg: &RingConfig,
    algorithm: Algorithm,
    election_hops: u64,
    announcement_hops: u64,
    rounds: Option<u32>,
    turnaround: u64,
) -> RunMetrics {
    RunMetrics {
        algorithm,
        n: cfg.n(),
        seed: cfg.seed(),
        strategy: cfg.strategy().to_string(),
        election_hops,
        announcement_hops,
        rounds,
        turnaround,
        turnaround_unit: TurnaroundUnit::Delta,
    }
}

enum Action {
    Initiate { position: usize },
    Deliver {
        from: usize,
        to: usize,
        arrived_from: Direction,
        message: ProtocolMessage,
    },
}

struct Scheduled {
    at: u64,
    seq: u64,
    action: Action,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        (self.at, self.seq) == (other.at, other.seq)
    }
}
impl Eq for Scheduled {}
impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert for earliest-first dispatch.
        (other.at, other.seq).cmp(&(self.at, self.seq))
    }
}

struct Simulation<'a> {
    cfg: &'a RingConfig,
    algorithm: Algorithm,
    announce: bool,
    nodes: Vec<NodeSm>,
    queue: BinaryHeap<Scheduled>,
    next_seq: u64,
    delays: Vec<[u64; 2]>,
    records: Vec<TraceRecord>,
    header: TraceHeader,
    election_hops: u64,
    announcement_hops: u64,
    leader: Option<(usize, ProcessId)>,
    became_counts: Vec<u32>,
    learned: Vec<Option<ProcessId>>,
    now: u64,
}

impl<'a> Simulation<'a> {
    fn new(
        cfg: &'a RingConfig,
        algorithm: Algorithm,
        delay: &DelayModel,
        options: &RunOptions,
        header: TraceHeader,
    ) -> Self {
        let n = cfg.n();
        let mut sim = Simulation {
            cfg,
            algorithm,
            announce: options.announce,
            nodes: Vec::with_capacity(n),
            queue: BinaryHeap::new(),
            next_seq: 0,
            delays: delay.link_delays(n),
            records: Vec::new(),
            header,
            election_hops: 0,
            announcement_hops: 0,
            leader: None,
            became_counts: vec![0; n],
            learned: vec![None; n],
            now: 0,
        };

        match algorithm {
            Algorithm::ChangRoberts => {
                for position in 0..n {
                    sim.nodes
                        .push(NodeSm::Cr(CrNodeState::idle(cfg.id_at(position), sim.announce)));
                }
                for (position, offset) in options.initiators.offsets(n) {
                    let seq = sim.take_seq();
                    sim.queue.push(Scheduled {
                        at: offset,
                        seq,
                        action: Action::Initiate { position },
                    });
                }
            }
            Algorithm::Franklin => {
                // All nodes start active at time zero.
                let mut initial = Vec::with_capacity(n);
                for position in 0..n {
                    let (node, outbound) =
                        FrNodeState::initiate(cfg.id_at(position), sim.announce);
                    sim.nodes.push(NodeSm::Fr(node));
                    initial.push((position, outbound));
                }
                for (position, outbound) in initial {
                    sim.enqueue_sends(position, outbound);
                }
            }
        }
        sim
    }

    fn take_seq(&mut self) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        seq
    }

    fn enqueue_sends(&mut self, from: usize, sends: Vec<(Direction, ProtocolMessage)>) {
        for (direction, message) in sends {
            let to = match direction {
                Direction::Clockwise => self.cfg.successor(from),
                Direction::CounterClockwise => self.cfg.predecessor(from),
            };
            if message.is_announcement() {
                self.announcement_hops += 1;
            } else {
                self.election_hops += 1;
            }
            let at = self.now + self.delays[from][direction.index()];
            let seq = self.take_seq();
            self.queue.push(Scheduled {
                at,
                seq,
                action: Action::Deliver {
                    from,
                    to,
                    arrived_from: direction.opposite(),
                    message,
                },
            });
        }
    }

    fn partial_trace(&self) -> Box<Trace> {
        Box::new(Trace {
            header: self.header.clone(),
            records: self.records.clone(),
        })
    }

    fn run(mut self) -> Result<SimReport, SimError> {
        while let Some(item) = self.queue.pop() {
            self.now = item.at;
            match item.action {
                Action::Initiate { position } => {
                    let NodeSm::Cr(node) = &mut self.nodes[position] else {
                        unreachable!("initiate events are chang-roberts only");
                    };
                    let outbound = node.start_election();
                    self.enqueue_sends(position, outbound);
                }
                Action::Deliver {
                    from,
                    to,
                    arrived_from,
                    message,
                } => {
                    let effects = self.nodes[to].handle(message, arrived_from).map_err(
                        |violation| SimError::Violation {
                            position: to,
                            time: self.now,
                            violation,
                            trace: self.partial_trace(),
                        },
                    )?;
                    for event in &effects.events {
                        match *event {
                            NodeEvent::BecameLeader { leader } => {
                                self.became_counts[to] += 1;
                                self.leader = Some((to, leader));
                            }
                            NodeEvent::LearnedLeader { leader } => {
                                self.learned[to] = Some(leader);
                            }
                            NodeEvent::TurnedPassive | NodeEvent::RoundAdvanced { .. } => {}
                        }
                    }
                    self.records.push(TraceRecord {
                        t: self.now,
                        from,
                        to,
                        message,
                        events: effects.events,
                    });
                    self.enqueue_sends(to, effects.outbound);
                }
            }
        }
        self.finish()
    }

    fn finish(self) -> Result<SimReport, SimError> {
        let Some((leader_position, leader)) = self.leader else {
            return Err(SimError::NoLeader {
                trace: self.partial_trace(),
            });
        };
        self.check_safety(leader_position, leader)?;

        let turnaround = self.records.last().map(|r| r.t).unwrap_or(0);
        let rounds = match self.algorithm {
            Algorithm::Franklin => self.nodes[leader_position].franklin_round(),
            Algorithm::ChangRoberts => None,
        };
        Ok(SimReport {
            metrics: run_metrics(
                self.cfg,
                self.algorithm,
                self.election_hops,
                self.announcement_hops,
                rounds,
                turnaround,
            ),
            trace: Trace {
                header: self.header,
                records: self.records,
            },
            leader,
            leader_position,
        })
    }

    fn check_safety(&self, leader_position: usize, leader: ProcessId) -> Result<(), SimError> {
        let fail = |detail: String| {
            Err(SimError::Safety {
                detail,
                trace: self.partial_trace(),
            })
        };
        let total_became: u32 = self.became_counts.iter().sum();
        if total_became != 1 {
            return fail(format!("{total_became} BecameLeader events, expected 1"));
        }
        if leader != self.cfg.max_id() {
            return fail(format!(
                "leader {leader} is not the ring maximum {}",
                self.cfg.max_id()
            ));
        }
        if !self.nodes[leader_position].is_leader() {
            return fail(format!("position {leader_position} not in leader state"));
        }
        if self.announce {
            for (position, learned) in self.learned.iter().enumerate() {
                if position == leader_position {
                    continue;
                }
                if *learned != Some(leader) {
                    return fail(format!(
                        "position {position} learned {learned:?}, expected {leader}"
                    ));
                }
            }
        }
        if self.learned[leader_position].is_some() {
            return fail(format!("leader at {leader_position} also learned a leader"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, PlacementStrategy};
    use crate::Initiators;
    use std::collections::BTreeSet;

    fn ring(ids: &[u64]) -> RingConfig {
        build_ring(ids.len(), &PlacementStrategy::Explicit(ids.to_vec()), 0).unwrap()
    }

    fn constant(delta: u64) -> DelayModel {
        DelayModel::Constant { delta }
    }

    fn run(
        cfg: &RingConfig,
        algorithm: Algorithm,
        delay: &DelayModel,
        options: &RunOptions,
    ) -> SimReport {
        run_election(cfg, algorithm, delay, options).unwrap()
    }

    #[test]
    fn forwarded_token_moves_one_hop_per_delta() {
        // Token 7 reaches the node with ID 5 after three hops and is
        // forwarded on the next.
        let cfg = ring(&[7, 0, 1, 5]);
        let report = run(
            &cfg,
            Algorithm::ChangRoberts,
            &constant(2),
            &RunOptions::default(),
        );
        let hop_in = report.trace.records.iter().find(|r| {
            r.to == 3 && r.message == ProtocolMessage::CrElection { candidate: ProcessId::new(7) }
        });
        assert_eq!(hop_in.unwrap().t, 6);
        let hop_out = report.trace.records.iter().find(|r| {
            r.from == 3
                && r.message == ProtocolMessage::CrElection { candidate: ProcessId::new(7) }
        });
        assert_eq!(hop_out.unwrap().t, 8);
    }

    #[test]
    fn single_node_ring_elects_immediately() {
        let cfg = ring(&[7]);
        for algorithm in [Algorithm::ChangRoberts, Algorithm::Franklin] {
            let report = run(&cfg, algorithm, &constant(1), &RunOptions::default());
            assert_eq!(report.leader, ProcessId::new(7));
            assert_eq!(report.metrics.total_hops(), 0);
            assert_eq!(report.metrics.turnaround, 0);
            assert!(report.trace.records.is_empty());
            if algorithm == Algorithm::Franklin {
                assert_eq!(report.metrics.rounds, Some(0));
            }
        }
    }

    #[test]
    fn chang_roberts_extremal_counts_at_n16() {
        let worst = build_ring(16, &PlacementStrategy::CrWorst, 0).unwrap();
        let report = run(
            &worst,
            Algorithm::ChangRoberts,
            &constant(1),
            &RunOptions::default(),
        );
        assert_eq!(report.metrics.election_hops, 136);
        assert_eq!(report.metrics.announcement_hops, 16);
        assert_eq!(report.metrics.total_hops(), 152);

        let best = build_ring(16, &PlacementStrategy::CrBest, 0).unwrap();
        let report = run(
            &best,
            Algorithm::ChangRoberts,
            &constant(1),
            &RunOptions::default(),
        );
        assert_eq!(report.metrics.total_hops(), 47);
    }

    #[test]
    fn chang_roberts_turnaround_is_two_loops() {
        for n in [2usize, 3, 5, 8] {
            for delta in [1u64, 3] {
                let cfg = build_ring(n, &PlacementStrategy::Random, n as u64).unwrap();
                let report = run(
                    &cfg,
                    Algorithm::ChangRoberts,
                    &constant(delta),
                    &RunOptions::default(),
                );
                assert_eq!(report.metrics.turnaround, 2 * n as u64 * delta);
            }
        }
    }

    #[test]
    fn two_node_franklin_takes_two_rounds() {
        let cfg = ring(&[1, 2]);
        let report = run(&cfg, Algorithm::Franklin, &constant(1), &RunOptions::default());
        assert_eq!(report.leader, ProcessId::new(2));
        assert_eq!(report.metrics.rounds, Some(2));
        assert_eq!(report.metrics.election_hops, 8);
        assert_eq!(report.metrics.announcement_hops, 2);
    }

    #[test]
    fn announcements_can_be_disabled() {
        let cfg = ring(&[3, 1, 4, 0, 2]);
        let options = RunOptions {
            announce: false,
            ..RunOptions::default()
        };
        for algorithm in [Algorithm::ChangRoberts, Algorithm::Franklin] {
            let report = run(&cfg, algorithm, &constant(1), &options);
            assert_eq!(report.metrics.announcement_hops, 0);
            assert_eq!(report.leader, ProcessId::new(4));
            assert!(report
                .trace
                .records
                .iter()
                .all(|r| !r.message.is_announcement()));
        }
    }

    #[test]
    fn sole_initiator_walks_the_ring_twice() {
        let cfg = ring(&[2, 4, 1, 0, 3]);
        // Position 1 holds the maximum; let it initiate alone.
        let options = RunOptions {
            announce: true,
            initiators: Initiators::Subset(BTreeSet::from([1])),
        };
        let report = run(&cfg, Algorithm::ChangRoberts, &constant(1), &options);
        assert_eq!(report.leader, ProcessId::new(4));
        assert_eq!(report.metrics.election_hops, 5);
        assert_eq!(report.metrics.announcement_hops, 5);
        assert_eq!(report.metrics.turnaround, 10);
    }

    #[test]
    fn small_initiator_is_replaced_along_the_way() {
        let cfg = ring(&[2, 4, 1, 0, 3]);
        // Position 3 (ID 0) initiates; every stronger node it reaches takes
        // over, so the leader is still the maximum.
        let options = RunOptions {
            announce: true,
            initiators: Initiators::Subset(BTreeSet::from([3])),
        };
        let report = run(&cfg, Algorithm::ChangRoberts, &constant(1), &options);
        assert_eq!(report.leader, ProcessId::new(4));
    }

    #[test]
    fn empty_initiator_set_never_elects() {
        let cfg = ring(&[0, 1, 2]);
        let options = RunOptions {
            announce: true,
            initiators: Initiators::Subset(BTreeSet::new()),
        };
        let err = run_election(&cfg, Algorithm::ChangRoberts, &constant(1), &options).unwrap_err();
        assert!(matches!(err, SimError::NoLeader { .. }));
    }

    #[test]
    fn staggered_initiation_still_elects_the_maximum() {
        let cfg = ring(&[2, 4, 1, 0, 3]);
        let options = RunOptions {
            announce: true,
            initiators: Initiators::Staggered(
                [(0usize, 0u64), (3, 7), (4, 2)].into_iter().collect(),
            ),
        };
        let report = run(&cfg, Algorithm::ChangRoberts, &constant(1), &options);
        assert_eq!(report.leader, ProcessId::new(4));
        let twice = run(&cfg, Algorithm::ChangRoberts, &constant(1), &options);
        assert_eq!(report.trace, twice.trace);
    }

    #[test]
    fn franklin_rejects_partial_initiation() {
        let cfg = ring(&[0, 1, 2]);
        let options = RunOptions {
            announce: true,
            initiators: Initiators::Subset(BTreeSet::from([0, 1])),
        };
        let err = run_election(&cfg, Algorithm::Franklin, &constant(1), &options).unwrap_err();
        assert!(matches!(
            err,
            SimError::Config(ConfigError::FranklinNeedsAllInitiators)
        ));
    }

    #[test]
    fn delay_models_are_validated() {
        let cfg = ring(&[0, 1]);
        let zero = DelayModel::Constant { delta: 0 };
        assert!(matches!(
            run_election(&cfg, Algorithm::ChangRoberts, &zero, &RunOptions::default()),
            Err(SimError::InvalidDelay { .. })
        ));
        let inverted = DelayModel::UniformPerLink {
            min: 5,
            max: 2,
            seed: 0,
        };
        assert!(matches!(
            run_election(&cfg, Algorithm::ChangRoberts, &inverted, &RunOptions::default()),
            Err(SimError::InvalidDelay { .. })
        ));
    }

    #[test]
    fn constant_delay_times_are_multiples_of_delta() {
        let cfg = build_ring(9, &PlacementStrategy::Random, 5).unwrap();
        for algorithm in [Algorithm::ChangRoberts, Algorithm::Franklin] {
            let report = run(&cfg, algorithm, &constant(3), &RunOptions::default());
            assert!(report.trace.records.iter().all(|r| r.t % 3 == 0));
        }
    }

    #[test]
    fn per_link_delays_preserve_fifo_and_the_outcome() {
        let cfg = build_ring(8, &PlacementStrategy::Random, 11).unwrap();
        let uniform = DelayModel::UniformPerLink {
            min: 1,
            max: 9,
            seed: 23,
        };
        for algorithm in [Algorithm::ChangRoberts, Algorithm::Franklin] {
            let fixed = run(&cfg, algorithm, &constant(1), &RunOptions::default());
            let varied = run(&cfg, algorithm, &uniform, &RunOptions::default());
            // Hop counts and the winner are delay-independent.
            assert_eq!(varied.leader, fixed.leader);
            assert_eq!(varied.metrics.election_hops, fixed.metrics.election_hops);
            assert_eq!(varied.metrics.rounds, fixed.metrics.rounds);

            // Deliveries on each directed channel stay in send order; with
            // fixed per-link delays that shows as non-decreasing times.
            let mut per_channel: std::collections::HashMap<(usize, usize), u64> =
                std::collections::HashMap::new();
            for r in &varied.trace.records {
                let last = per_channel.entry((r.from, r.to)).or_insert(0);
                assert!(r.t >= *last);
                *last = r.t;
            }
        }
    }

    #[test]
    fn identical_inputs_give_byte_identical_traces() {
        let cfg = build_ring(12, &PlacementStrategy::Random, 99).unwrap();
        let uniform = DelayModel::UniformPerLink {
            min: 1,
            max: 4,
            seed: 7,
        };
        for algorithm in [Algorithm::ChangRoberts, Algorithm::Franklin] {
            let a = run(&cfg, algorithm, &uniform, &RunOptions::default());
            let b = run(&cfg, algorithm, &uniform, &RunOptions::default());
            assert_eq!(a.trace.to_ldjson(), b.trace.to_ldjson());
            assert_eq!(a.metrics, b.metrics);
        }
    }

    #[test]
    fn trace_export_matches_the_documented_schema() {
        let report = run(
            &ring(&[1, 0]),
            Algorithm::ChangRoberts,
            &constant(1),
            &RunOptions::default(),
        );
        let expected = "\
{\"schema\":\"ring-elect/trace\",\"version\":1,\"algorithm\":\"chang-roberts\",\"n\":2,\
\"placement\":[1,0],\"seed\":0,\"strategy\":\"explicit\",\"delay\":{\"model\":\"constant\",\
\"delta\":1},\"announce\":true}
{\"t\":1,\"from\":0,\"to\":1,\"kind\":\"cr_election\",\"payload\":{\"candidate\":1},\"events\":[]}
{\"t\":1,\"from\":1,\"to\":0,\"kind\":\"cr_election\",\"payload\":{\"candidate\":0},\"events\":[]}
{\"t\":2,\"from\":1,\"to\":0,\"kind\":\"cr_election\",\"payload\":{\"candidate\":1},\
\"events\":[{\"event\":\"became_leader\",\"leader\":1}]}
{\"t\":3,\"from\":0,\"to\":1,\"kind\":\"coordinator\",\"payload\":{\"leader\":1},\
\"events\":[{\"event\":\"learned_leader\",\"leader\":1}]}
{\"t\":4,\"from\":1,\"to\":0,\"kind\":\"coordinator\",\"payload\":{\"leader\":1},\"events\":[]}
";
        assert_eq!(report.trace.to_ldjson(), expected);
    }
}
