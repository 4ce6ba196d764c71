//! Franklin election over a bidirectional ring.
//!
//! The algorithm proceeds in rounds. Every active node sends a token
//! carrying its ID to both neighbors, then examines the two tokens that
//! arrive from the nearest active node on each side: if either carries a
//! larger ID the node turns passive (from then on it only forwards traffic,
//! acting as a router); if both tokens are its own they survived a full
//! loop and the node is the leader; otherwise it advances to the next
//! round. At least half of the active nodes drop out each round.
//!
//! Tokens carry an explicit round number. The classical formulation leans
//! on FIFO channels alone; the explicit round makes FIFO violations
//! detectable and lets a node hold a fast neighbor's next-round token while
//! it finishes the current round (at most one round of skew is possible on
//! an intact ring, anything more is reported as a violation).

use super::{
    Direction, Effects, NodeEvent, ProcessId, ProtocolMessage, ProtocolViolation,
};

/// The announcement circulates in the successor direction.
const ANNOUNCE_DIRECTION: Direction = Direction::Clockwise;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrRole {
    /// Competing: sends tokens and decides rounds.
    Active,
    /// Dropped out: forwards every message to the opposite neighbor.
    Passive,
    Leader,
    Follower(ProcessId),
}

/// Per-node Franklin state.
///
/// `current` holds the origin of the token received from each side for the
/// round in progress; `deferred` holds at most one next-round token per
/// side, received while this node was still deciding. Slots are indexed by
/// the side the token arrived from ([`Direction::index`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrNodeState {
    own: ProcessId,
    round: u32,
    role: FrRole,
    current: [Option<ProcessId>; 2],
    deferred: [Option<ProcessId>; 2],
    announce: bool,
}

impl FrNodeState {
    /// Start round 1: active, own token to both neighbors.
    pub fn initiate(own: ProcessId, announce: bool) -> (Self, Vec<(Direction, ProtocolMessage)>) {
        let state = FrNodeState {
            own,
            round: 1,
            role: FrRole::Active,
            current: [None, None],
            deferred: [None, None],
            announce,
        };
        (state, own_tokens(own, 1))
    }

    pub fn own(&self) -> ProcessId {
        self.own
    }

    pub fn role(&self) -> FrRole {
        self.role
    }

    /// The round this node is deciding (or decided last).
    pub fn round(&self) -> u32 {
        self.round
    }

    /// Apply one inbound message. `arrived_from` names the side the message
    /// came in on: a token traveling clockwise arrives from the
    /// counter-clockwise side.
    pub fn handle(
        &mut self,
        msg: ProtocolMessage,
        arrived_from: Direction,
    ) -> Result<Effects, ProtocolViolation> {
        match (self.role, msg) {
            (FrRole::Active, ProtocolMessage::FrToken { origin, round, direction }) => {
                self.on_active_token(origin, round, direction, arrived_from)
            }
            (FrRole::Passive, ProtocolMessage::FrToken { direction, .. }) => {
                check_travel_direction(direction, arrived_from)?;
                // Router: pass it through unchanged.
                Ok(Effects::none().send(arrived_from.opposite(), msg))
            }
            (FrRole::Passive, ProtocolMessage::Coordinator { leader }) => {
                if leader == self.own {
                    return Err(unexpected(&msg, self.role));
                }
                self.role = FrRole::Follower(leader);
                Ok(Effects::none()
                    .emit(NodeEvent::LearnedLeader { leader })
                    .send(arrived_from.opposite(), msg))
            }
            (FrRole::Leader, ProtocolMessage::Coordinator { leader }) if leader == self.own => {
                // Announcement completed the ring.
                Ok(Effects::none())
            }
            (_, msg) => Err(unexpected(&msg, self.role)),
        }
    }

    fn on_active_token(
        &mut self,
        origin: ProcessId,
        round: u32,
        direction: Direction,
        arrived_from: Direction,
    ) -> Result<Effects, ProtocolViolation> {
        check_travel_direction(direction, arrived_from)?;
        let side = arrived_from.index();

        if round < self.round {
            return Err(ProtocolViolation::StaleToken {
                token_round: round,
                node_round: self.round,
            });
        }
        if round > self.round + 1 {
            return Err(ProtocolViolation::RoundSkipped {
                token_round: round,
                node_round: self.round,
            });
        }

        let slot = if round == self.round {
            &mut self.current[side]
        } else {
            &mut self.deferred[side]
        };
        if slot.is_some() {
            return Err(ProtocolViolation::DuplicateToken {
                round,
                direction: arrived_from,
            });
        }
        *slot = Some(origin);

        self.decide_while_ready()
    }

    /// Decide the round once both current-round tokens are held. Advancing
    /// promotes deferred tokens, which may complete the next round
    /// immediately, hence the loop.
    fn decide_while_ready(&mut self) -> Result<Effects, ProtocolViolation> {
        let mut effects = Effects::none();
        while let [Some(a), Some(b)] = self.current {
            self.current = [None, None];

            if a == self.own && b == self.own {
                // Own tokens survived a full loop: no larger ID is active.
                if self.deferred.iter().any(Option::is_some) {
                    return Err(ProtocolViolation::UnexpectedMessage {
                        message: "buffered next-round token".into(),
                        state: "node whose own tokens completed the loop".into(),
                    });
                }
                self.role = FrRole::Leader;
                effects = effects.emit(NodeEvent::BecameLeader { leader: self.own });
                if self.announce {
                    effects = effects.send(
                        ANNOUNCE_DIRECTION,
                        ProtocolMessage::Coordinator { leader: self.own },
                    );
                }
                return Ok(effects);
            }

            if a.max(b) > self.own {
                self.role = FrRole::Passive;
                effects = effects.emit(NodeEvent::TurnedPassive);
                // Next-round tokens buffered here are someone else's
                // business now; send them on their way.
                for side in [Direction::Clockwise, Direction::CounterClockwise] {
                    if let Some(origin) = self.deferred[side.index()].take() {
                        effects = effects.send(
                            side.opposite(),
                            ProtocolMessage::FrToken {
                                origin,
                                round: self.round + 1,
                                direction: side.opposite(),
                            },
                        );
                    }
                }
                return Ok(effects);
            }

            if a == self.own || b == self.own {
                // One own token looped while a smaller competitor is still
                // active: impossible on an intact ring.
                return Err(ProtocolViolation::UnexpectedMessage {
                    message: "own token returned alongside a live competitor".into(),
                    state: "active node".into(),
                });
            }

            // Both neighbors' candidates are smaller: survive the round.
            self.round += 1;
            self.current = self.deferred;
            self.deferred = [None, None];
            effects = effects.emit(NodeEvent::RoundAdvanced { round: self.round });
            for send in own_tokens(self.own, self.round) {
                effects.outbound.push(send);
            }
        }
        Ok(effects)
    }
}

fn own_tokens(own: ProcessId, round: u32) -> Vec<(Direction, ProtocolMessage)> {
    [Direction::Clockwise, Direction::CounterClockwise]
        .into_iter()
        .map(|direction| {
            (
                direction,
                ProtocolMessage::FrToken {
                    origin: own,
                    round,
                    direction,
                },
            )
        })
        .collect()
}

fn check_travel_direction(
    token_direction: Direction,
    arrived_from: Direction,
) -> Result<(), ProtocolViolation> {
    if token_direction == arrived_from {
        return Err(ProtocolViolation::DirectionMismatch {
            token_direction,
            arrived_from,
        });
    }
    Ok(())
}

fn unexpected(msg: &ProtocolMessage, role: FrRole) -> ProtocolViolation {
    ProtocolViolation::UnexpectedMessage {
        message: msg.to_string(),
        state: format!("{role:?}"),
    }
}
