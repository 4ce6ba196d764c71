//! Pure, transport-agnostic state machines for the two election algorithms.
//!
//! Each node is a plain value. Feeding it a message (or the initiation
//! signal) yields outbound messages plus observable [`NodeEvent`]s; nothing
//! here knows about queues, clocks or threads. Handlers are deterministic:
//! identical (state, message, direction) inputs produce identical outputs.

mod chang_roberts;
mod franklin;

pub use chang_roberts::{CrNodeState, CrPhase};
pub use franklin::{FrNodeState, FrRole};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unique, totally ordered process identifier; the quantity the election
/// maximizes. IDs within one ring must be pairwise distinct.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct ProcessId(u64);

impl ProcessId {
    pub fn new(value: u64) -> Self {
        ProcessId(value)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl From<u64> for ProcessId {
    fn from(value: u64) -> Self {
        ProcessId(value)
    }
}

impl std::fmt::Display for ProcessId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Which neighbor a message goes to (or came from), as seen by a node.
///
/// `Clockwise` is the successor side: position `i`'s clockwise neighbor is
/// position `(i + 1) mod n`. A message sent clockwise is received from the
/// counter-clockwise side, and vice versa. Chang-Roberts uses the clockwise
/// (successor) direction only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Clockwise,
    CounterClockwise,
}

impl Direction {
    pub fn opposite(self) -> Direction {
        match self {
            Direction::Clockwise => Direction::CounterClockwise,
            Direction::CounterClockwise => Direction::Clockwise,
        }
    }

    /// Index 0/1, for direction-keyed tables.
    pub fn index(self) -> usize {
        match self {
            Direction::Clockwise => 0,
            Direction::CounterClockwise => 1,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Clockwise => f.write_str("clockwise"),
            Direction::CounterClockwise => f.write_str("counter_clockwise"),
        }
    }
}

/// Everything that travels over a ring channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProtocolMessage {
    /// Chang-Roberts election token carrying the strongest candidate so far.
    CrElection { candidate: ProcessId },
    /// Franklin round token. `direction` is the travel direction around the
    /// ring; a token keeps it across passive forwards.
    FrToken {
        origin: ProcessId,
        round: u32,
        direction: Direction,
    },
    /// Leader announcement, circulated once around the ring.
    Coordinator { leader: ProcessId },
}

impl ProtocolMessage {
    /// Announcement messages are tallied separately from election traffic.
    pub fn is_announcement(&self) -> bool {
        matches!(self, ProtocolMessage::Coordinator { .. })
    }
}

impl std::fmt::Display for ProtocolMessage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProtocolMessage::CrElection { candidate } => write!(f, "election({candidate})"),
            ProtocolMessage::FrToken { origin, round, .. } => {
                write!(f, "token({origin}, round {round})")
            }
            ProtocolMessage::Coordinator { leader } => write!(f, "coordinator({leader})"),
        }
    }
}

/// Observable state transitions, consumed by transports for metrics,
/// turnaround measurement and safety checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum NodeEvent {
    BecameLeader { leader: ProcessId },
    LearnedLeader { leader: ProcessId },
    TurnedPassive,
    RoundAdvanced { round: u32 },
}

/// Outbound messages and events produced by one handler invocation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Effects {
    pub outbound: Vec<(Direction, ProtocolMessage)>,
    pub events: Vec<NodeEvent>,
}

impl Effects {
    pub fn none() -> Self {
        Effects::default()
    }

    fn send(mut self, direction: Direction, message: ProtocolMessage) -> Self {
        self.outbound.push((direction, message));
        self
    }

    fn emit(mut self, event: NodeEvent) -> Self {
        self.events.push(event);
        self
    }
}

/// Either state machine behind one dispatch surface, for the transports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum NodeSm {
    Cr(CrNodeState),
    Fr(FrNodeState),
}

impl NodeSm {
    pub(crate) fn handle(
        &mut self,
        msg: ProtocolMessage,
        arrived_from: Direction,
    ) -> Result<Effects, ProtocolViolation> {
        match self {
            // Chang-Roberts traffic only ever flows one way.
            NodeSm::Cr(node) => node.handle(msg),
            NodeSm::Fr(node) => node.handle(msg, arrived_from),
        }
    }

    pub(crate) fn is_leader(&self) -> bool {
        match self {
            NodeSm::Cr(node) => node.phase() == CrPhase::Leader,
            NodeSm::Fr(node) => node.role() == FrRole::Leader,
        }
    }

    pub(crate) fn franklin_round(&self) -> Option<u32> {
        match self {
            NodeSm::Cr(_) => None,
            NodeSm::Fr(node) => Some(node.round()),
        }
    }
}

/// A message that cannot occur in a correct execution over reliable FIFO
/// channels. Transports abort the run and surface the diagnostic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolViolation {
    /// Own election token delivered to a node that never initiated:
    /// duplicate IDs or a broken topology.
    #[error("node {own} received its own election token while idle")]
    OwnTokenWhileIdle { own: ProcessId },
    /// Token skipped ahead of the node's round; FIFO assumption broken.
    #[error("round-{token_round} token at node in round {node_round}: fifo order broken")]
    RoundSkipped { token_round: u32, node_round: u32 },
    /// Second token for one (round, direction) slot.
    #[error("duplicate round-{round} token from the {direction} side")]
    DuplicateToken { round: u32, direction: Direction },
    /// Token for an already-decided round.
    #[error("stale round-{token_round} token at node in round {node_round}")]
    StaleToken { token_round: u32, node_round: u32 },
    /// Token direction field disagrees with the side it arrived on.
    #[error("token traveling {token_direction} arrived from the {arrived_from} side")]
    DirectionMismatch {
        token_direction: Direction,
        arrived_from: Direction,
    },
    /// Message that has no defined transition from the node's state.
    #[error("unexpected {message} at a node in state {state}")]
    UnexpectedMessage { message: String, state: String },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_opposite_is_an_involution() {
        for d in [Direction::Clockwise, Direction::CounterClockwise] {
            assert_eq!(d.opposite().opposite(), d);
            assert_ne!(d.opposite(), d);
        }
    }

    #[test]
    fn process_ids_order_naturally() {
        assert!(ProcessId::new(3) < ProcessId::new(7));
        assert_eq!(ProcessId::new(5), ProcessId::from(5));
        assert_eq!(ProcessId::new(9).value(), 9);
    }

    #[test]
    fn message_serialization_is_tagged() {
        let msg = ProtocolMessage::FrToken {
            origin: ProcessId::new(4),
            round: 2,
            direction: Direction::Clockwise,
        };
        let json = serde_json::to_string(&msg).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"fr_token","origin":4,"round":2,"direction":"clockwise"}"#
        );
        let back: ProtocolMessage = serde_json::from_str(&json).unwrap();
        assert_eq!(back, msg);
    }
}
