//! Live concurrent transport: one worker thread per ring position.
//!
//! Workers own their state machine and two inbound FIFO queues (one per
//! direction) and communicate only through the directed channels between
//! adjacent positions, mirroring the message-passing discipline of the sim
//! transport at real concurrency. A start barrier releases all initiators
//! together; the clock runs from barrier release to the last terminal event
//! (BecameLeader / LearnedLeader). The leader and all hop counts are
//! delay-independent, so they match the sim transport for the same ring and
//! options; only the measured time differs.
//!
//! The harness stops workers once the expected terminal events have all
//! arrived. Channels are unbounded, so sends never block and a run cannot
//! deadlock; a configurable timeout catches stalls and worker failures.

use std::sync::{Arc, Barrier};
use std::thread;
use std::time::{Duration, Instant};

use crossbeam::channel::{unbounded, Receiver, RecvTimeoutError, Sender};
use crossbeam::select;
use thiserror::Error;

use crate::protocol::{
    CrNodeState, Direction, FrNodeState, NodeEvent, NodeSm, ProcessId, ProtocolMessage,
    ProtocolViolation,
};
use crate::ring::{ConfigError, RingConfig};
use crate::{Algorithm, Initiators, RunOptions};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// Outcome of one live election run.
#[derive(Debug, Clone)]
pub struct LiveRunReport {
    pub leader: ProcessId,
    pub leader_position: usize,
    /// Barrier release to last terminal event, monotonic clock.
    pub turnaround_ns: u64,
    pub election_hops: u64,
    pub announcement_hops: u64,
    /// Franklin: the winner's final round number.
    pub rounds: Option<u32>,
    /// Events in emission order, per ring position.
    pub node_events: Vec<Vec<NodeEvent>>,
}

impl LiveRunReport {
    pub fn total_hops(&self) -> u64 {
        self.election_hops + self.announcement_hops
    }
}

#[derive(Debug, Error)]
pub enum LiveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("protocol violation at position {position}: {violation}")]
    Violation {
        position: usize,
        violation: ProtocolViolation,
    },
    #[error("election did not finish within {timeout:?} ({seen} terminal events seen)")]
    Timeout {
        timeout: Duration,
        seen: usize,
        partial: Vec<(usize, NodeEvent)>,
    },
    #[error("worker {position} panicked; run aborted")]
    WorkerPanic {
        position: usize,
        partial: Vec<(usize, NodeEvent)>,
    },
    #[error("inconsistent run: {detail}")]
    Inconsistent { detail: String },
}

enum HarnessMsg {
    Terminal {
        position: usize,
        event: NodeEvent,
        at: Instant,
    },
    Violation {
        position: usize,
        violation: ProtocolViolation,
    },
}

struct WorkerReport {
    election_sends: u64,
    announce_sends: u64,
    final_round: Option<u32>,
    events: Vec<NodeEvent>,
}

struct WorkerCtx {
    position: usize,
    own: ProcessId,
    algorithm: Algorithm,
    announce: bool,
    initiate: bool,
    rx_pred: Receiver<ProtocolMessage>,
    rx_succ: Receiver<ProtocolMessage>,
    rx_ctrl: Receiver<()>,
    tx_cw: Sender<ProtocolMessage>,
    tx_ccw: Sender<ProtocolMessage>,
    event_tx: Sender<HarnessMsg>,
    barrier: Arc<Barrier>,
}

/// Run one election with genuinely concurrent workers.
pub fn run_live(
    cfg: &RingConfig,
    algorithm: Algorithm,
    options: &RunOptions,
    timeout: Duration,
) -> Result<LiveRunReport, LiveError> {
    options.initiators.validate(cfg.n(), algorithm)?;
    if matches!(options.initiators, Initiators::Staggered(_)) {
        return Err(ConfigError::StaggeredNotSupported.into());
    }

    let n = cfg.n();
    let initiate: Vec<bool> = {
        let mut flags = vec![false; n];
        for (p, _) in options.initiators.offsets(n) {
            flags[p] = true;
        }
        flags
    };

    let (event_tx, event_rx) = unbounded();
    let barrier = Arc::new(Barrier::new(n + 1));

    // Directed channels: cw[i] carries clockwise traffic into position i
    // (sent by its predecessor), ccw[i] counter-clockwise traffic (sent by
    // its successor). Distinct channels per direction keep n = 2 sound.
    let (cw_tx, mut cw_rx): (Vec<_>, Vec<_>) = (0..n).map(|_| unbounded()).map(|(t, r)| (t, Some(r))).unzip();
    let (ccw_tx, mut ccw_rx): (Vec<_>, Vec<_>) =
        (0..n).map(|_| unbounded()).map(|(t, r)| (t, Some(r))).unzip();
    let mut ctrl_txs = Vec::with_capacity(n);
    let mut handles = Vec::with_capacity(n);

    for position in 0..n {
        let (ctrl_tx, rx_ctrl) = unbounded();
        ctrl_txs.push(ctrl_tx);
        let ctx = WorkerCtx {
            position,
            own: cfg.id_at(position),
            algorithm,
            announce: options.announce,
            initiate: initiate[position],
            rx_pred: cw_rx[position].take().expect("receiver taken once"),
            rx_succ: ccw_rx[position].take().expect("receiver taken once"),
            rx_ctrl,
            tx_cw: cw_tx[cfg.successor(position)].clone(),
            tx_ccw: ccw_tx[cfg.predecessor(position)].clone(),
            event_tx: event_tx.clone(),
            barrier: Arc::clone(&barrier),
        };
        let builder = thread::Builder::new().name(format!("ring-worker-{position}"));
        let handle = if n == 1 {
            // Degenerate ring: no channels, the node is the coordinator.
            builder.spawn(move || run_single_worker(ctx))
        } else {
            builder.spawn(move || run_worker(ctx))
        };
        handles.push(handle.expect("spawn worker"));
    }
    drop(event_tx);
    drop(cw_tx);
    drop(ccw_tx);

    barrier.wait();
    let start = Instant::now();
    let deadline = start + timeout;

    let need_become = 1usize;
    let need_learn = if options.announce { n - 1 } else { 0 };
    let mut become_seen: Vec<(usize, ProcessId, Instant)> = Vec::new();
    let mut learn_seen = 0usize;
    let mut terminals: Vec<(usize, NodeEvent, Instant)> = Vec::new();

    let stop_all = |ctrl_txs: &[Sender<()>]| {
        for tx in ctrl_txs {
            let _ = tx.send(());
        }
    };
    let partial = |terminals: &[(usize, NodeEvent, Instant)]| {
        terminals.iter().map(|&(p, e, _)| (p, e)).collect::<Vec<_>>()
    };

    while become_seen.len() < need_become || learn_seen < need_learn {
        let remaining = deadline.saturating_duration_since(Instant::now());
        match event_rx.recv_timeout(remaining) {
            Ok(HarnessMsg::Terminal {
                position,
                event,
                at,
            }) => {
                match event {
                    NodeEvent::BecameLeader { leader } => become_seen.push((position, leader, at)),
                    NodeEvent::LearnedLeader { .. } => learn_seen += 1,
                    _ => {}
                }
                terminals.push((position, event, at));
            }
            Ok(HarnessMsg::Violation {
                position,
                violation,
            }) => {
                stop_all(&ctrl_txs);
                join_all(handles)?;
                return Err(LiveError::Violation {
                    position,
                    violation,
                });
            }
            Err(RecvTimeoutError::Timeout) => {
                stop_all(&ctrl_txs);
                let partial = partial(&terminals);
                join_all(handles)?;
                return Err(LiveError::Timeout {
                    timeout,
                    seen: terminals.len(),
                    partial,
                });
            }
            Err(RecvTimeoutError::Disconnected) => {
                // Workers never drop their event sender before a stop; a
                // disconnect means at least one of them died.
                stop_all(&ctrl_txs);
                let partial = partial(&terminals);
                join_all(handles)?;
                return Err(LiveError::WorkerPanic {
                    position: 0,
                    partial,
                });
            }
        }
    }

    stop_all(&ctrl_txs);
    let reports = join_all(handles)?;

    let &(leader_position, leader, _) = become_seen.first().expect("loop exit requires a leader");
    if become_seen.len() != 1 {
        return Err(LiveError::Inconsistent {
            detail: format!("{} BecameLeader events", become_seen.len()),
        });
    }
    if leader != cfg.max_id() {
        return Err(LiveError::Inconsistent {
            detail: format!("leader {leader} is not the ring maximum {}", cfg.max_id()),
        });
    }

    let turnaround = terminals
        .iter()
        .map(|&(_, _, at)| at.duration_since(start))
        .max()
        .unwrap_or_default();

    Ok(LiveRunReport {
        leader,
        leader_position,
        turnaround_ns: turnaround.as_nanos() as u64,
        election_hops: reports.iter().map(|r| r.election_sends).sum(),
        announcement_hops: reports.iter().map(|r| r.announce_sends).sum(),
        rounds: match algorithm {
            Algorithm::Franklin => reports[leader_position].final_round,
            Algorithm::ChangRoberts => None,
        },
        node_events: reports.into_iter().map(|r| r.events).collect(),
    })
}

fn join_all(handles: Vec<thread::JoinHandle<WorkerReport>>) -> Result<Vec<WorkerReport>, LiveError> {
    let mut reports = Vec::with_capacity(handles.len());
    for (position, handle) in handles.into_iter().enumerate() {
        reports.push(handle.join().map_err(|_| LiveError::WorkerPanic {
            position,
            partial: Vec::new(),
        })?);
    }
    Ok(reports)
}

/// The n = 1 worker: the coordinator by definition, zero messages.
fn run_single_worker(ctx: WorkerCtx) -> WorkerReport {
    ctx.barrier.wait();
    let event = NodeEvent::BecameLeader { leader: ctx.own };
    let _ = ctx.event_tx.send(HarnessMsg::Terminal {
        position: ctx.position,
        event,
        at: Instant::now(),
    });
    let _ = ctx.rx_ctrl.recv();
    WorkerReport {
        election_sends: 0,
        announce_sends: 0,
        final_round: match ctx.algorithm {
            Algorithm::Franklin => Some(0),
            Algorithm::ChangRoberts => None,
        },
        events: vec![event],
    }
}

fn run_worker(ctx: WorkerCtx) -> WorkerReport {
    let mut report = WorkerReport {
        election_sends: 0,
        announce_sends: 0,
        final_round: None,
        events: Vec::new(),
    };

    // Build the node before the barrier; nothing is sent until release.
    let (mut node, first_sends) = match ctx.algorithm {
        Algorithm::ChangRoberts => {
            let mut state = CrNodeState::idle(ctx.own, ctx.announce);
            let sends = if ctx.initiate {
                state.start_election()
            } else {
                Vec::new()
            };
            (NodeSm::Cr(state), sends)
        }
        Algorithm::Franklin => {
            let (state, sends) = FrNodeState::initiate(ctx.own, ctx.announce);
            (NodeSm::Fr(state), sends)
        }
    };

    ctx.barrier.wait();
    dispatch(&ctx, &mut report, first_sends);

    loop {
        select! {
            recv(ctx.rx_ctrl) -> _ => break,
            recv(ctx.rx_pred) -> msg => match msg {
                Ok(msg) => {
                    if !consume(&ctx, &mut node, &mut report, msg, Direction::CounterClockwise) {
                        break;
                    }
                }
                Err(_) => {
                    // Peer gone; a stop is on its way.
                    let _ = ctx.rx_ctrl.recv();
                    break;
                }
            },
            recv(ctx.rx_succ) -> msg => match msg {
                Ok(msg) => {
                    if !consume(&ctx, &mut node, &mut report, msg, Direction::Clockwise) {
                        break;
                    }
                }
                Err(_) => {
                    let _ = ctx.rx_ctrl.recv();
                    break;
                }
            },
        }
    }

    report.final_round = node.franklin_round();
    report
}

/// Apply one message; returns false when the worker should stop.
fn consume(
    ctx: &WorkerCtx,
    node: &mut NodeSm,
    report: &mut WorkerReport,
    msg: ProtocolMessage,
    arrived_from: Direction,
) -> bool {
    match node.handle(msg, arrived_from) {
        Ok(effects) => {
            dispatch(ctx, report, effects.outbound);
            for event in effects.events {
                report.events.push(event);
                if matches!(
                    event,
                    NodeEvent::BecameLeader { .. } | NodeEvent::LearnedLeader { .. }
                ) {
                    let _ = ctx.event_tx.send(HarnessMsg::Terminal {
                        position: ctx.position,
                        event,
                        at: Instant::now(),
                    });
                }
            }
            true
        }
        Err(violation) => {
            let _ = ctx.event_tx.send(HarnessMsg::Violation {
                position: ctx.position,
                violation,
            });
            false
        }
    }
}

fn dispatch(
    ctx: &WorkerCtx,
    report: &mut WorkerReport,
    sends: Vec<(Direction, ProtocolMessage)>,
) {
    for (direction, message) in sends {
        if message.is_announcement() {
            report.announce_sends += 1;
        } else {
            report.election_sends += 1;
        }
        let tx = match direction {
            Direction::Clockwise => &ctx.tx_cw,
            Direction::CounterClockwise => &ctx.tx_ccw,
        };
        // A closed peer only happens while the harness is tearing down.
        let _ = tx.send(message);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_ring, PlacementStrategy};
    use crate::sim::{run_election, DelayModel};
    use std::collections::BTreeSet;

    fn run(cfg: &RingConfig, algorithm: Algorithm, options: &RunOptions) -> LiveRunReport {
        run_live(cfg, algorithm, options, DEFAULT_TIMEOUT).unwrap()
    }

    #[test]
    fn single_node_ring_is_instant() {
        let cfg = build_ring(1, &PlacementStrategy::CrBest, 0).unwrap();
        for algorithm in [Algorithm::ChangRoberts, Algorithm::Franklin] {
            let report = run(&cfg, algorithm, &RunOptions::default());
            assert_eq!(report.leader, ProcessId::new(0));
            assert_eq!(report.total_hops(), 0);
            if algorithm == Algorithm::Franklin {
                assert_eq!(report.rounds, Some(0));
            }
        }
    }

    #[test]
    fn franklin_matches_the_sim_counts() {
        let cfg = build_ring(16, &PlacementStrategy::Random, 3).unwrap();
        let options = RunOptions::default();
        let live = run(&cfg, Algorithm::Franklin, &options);
        let sim = run_election(
            &cfg,
            Algorithm::Franklin,
            &DelayModel::Constant { delta: 1 },
            &options,
        )
        .unwrap();
        assert_eq!(live.leader, sim.leader);
        assert_eq!(live.election_hops, sim.metrics.election_hops);
        assert_eq!(live.announcement_hops, sim.metrics.announcement_hops);
        assert_eq!(live.rounds, sim.metrics.rounds);
        // 2 * n * rounds election hops, plus n announcement hops.
        assert_eq!(
            live.election_hops,
            2 * 16 * u64::from(live.rounds.unwrap())
        );
        assert_eq!(live.announcement_hops, 16);
    }

    #[test]
    fn chang_roberts_subset_matches_the_sim_counts() {
        let cfg = build_ring(9, &PlacementStrategy::Random, 8).unwrap();
        let options = RunOptions {
            announce: true,
            initiators: Initiators::Subset(BTreeSet::from([0, 4, 7])),
        };
        let live = run(&cfg, Algorithm::ChangRoberts, &options);
        let sim = run_election(
            &cfg,
            Algorithm::ChangRoberts,
            &DelayModel::Constant { delta: 1 },
            &options,
        )
        .unwrap();
        assert_eq!(live.leader, sim.leader);
        assert_eq!(live.election_hops, sim.metrics.election_hops);
        assert_eq!(live.announcement_hops, sim.metrics.announcement_hops);
    }

    #[test]
    fn without_announcements_only_the_leader_knows() {
        let cfg = build_ring(8, &PlacementStrategy::Random, 5).unwrap();
        let options = RunOptions {
            announce: false,
            ..RunOptions::default()
        };
        let report = run(&cfg, Algorithm::Franklin, &options);
        assert_eq!(report.announcement_hops, 0);
        let learned = report
            .node_events
            .iter()
            .flatten()
            .filter(|e| matches!(e, NodeEvent::LearnedLeader { .. }))
            .count();
        assert_eq!(learned, 0);
    }

    #[test]
    fn staggered_initiation_is_rejected() {
        let cfg = build_ring(4, &PlacementStrategy::Random, 0).unwrap();
        let options = RunOptions {
            announce: true,
            initiators: Initiators::Staggered([(0usize, 5u64)].into_iter().collect()),
        };
        let err = run_live(&cfg, Algorithm::ChangRoberts, &options, DEFAULT_TIMEOUT).unwrap_err();
        assert!(matches!(
            err,
            LiveError::Config(ConfigError::StaggeredNotSupported)
        ));
    }

    #[test]
    fn wall_clock_turnaround_is_recorded() {
        let cfg = build_ring(256, &PlacementStrategy::Random, 1).unwrap();
        let report = run(&cfg, Algorithm::ChangRoberts, &RunOptions::default());
        assert_eq!(report.leader, ProcessId::new(255));
        assert!(report.turnaround_ns > 0);
        // Every node logged a terminal event.
        assert!(report
            .node_events
            .iter()
            .all(|events| events.iter().any(|e| matches!(
                e,
                NodeEvent::BecameLeader { .. } | NodeEvent::LearnedLeader { .. }
            ))));
    }
}
