//! Chang-Roberts election over a unidirectional ring.
//!
//! Election tokens travel in the successor (clockwise) direction only.
//! A node forwards tokens carrying a larger ID, replaces smaller ones with
//! its own candidacy if it has not participated yet, swallows smaller ones
//! otherwise, and wins when its own token survives a full loop. The winner
//! circulates a Coordinator announcement once so every node learns the
//! outcome.

use super::{
    Direction, Effects, NodeEvent, ProcessId, ProtocolMessage, ProtocolViolation,
};

/// Chang-Roberts tokens always move toward the successor.
const TOKEN_DIRECTION: Direction = Direction::Clockwise;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrPhase {
    /// Not yet touched by the election.
    Idle,
    /// Initiated or contacted; own candidacy may be in flight.
    Electing,
    Leader,
    Follower(ProcessId),
}

/// Per-node Chang-Roberts state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrNodeState {
    own: ProcessId,
    participant: bool,
    phase: CrPhase,
    announce: bool,
}

impl CrNodeState {
    /// Initiate an election: become a participant and send own candidacy to
    /// the successor.
    pub fn initiate(own: ProcessId, announce: bool) -> (Self, Vec<(Direction, ProtocolMessage)>) {
        let mut state = CrNodeState::idle(own, announce);
        let outbound = state.start_election();
        (state, outbound)
    }

    /// Begin the election from an existing node. A node that already
    /// participates (or has finished) stays quiet: its candidacy, or a
    /// stronger one, is in flight already.
    pub fn start_election(&mut self) -> Vec<(Direction, ProtocolMessage)> {
        if self.phase != CrPhase::Idle {
            return Vec::new();
        }
        self.participant = true;
        self.phase = CrPhase::Electing;
        vec![(
            TOKEN_DIRECTION,
            ProtocolMessage::CrElection { candidate: self.own },
        )]
    }

    /// A non-initiator; joins the election on first contact.
    pub fn idle(own: ProcessId, announce: bool) -> Self {
        CrNodeState {
            own,
            participant: false,
            phase: CrPhase::Idle,
            announce,
        }
    }

    pub fn own(&self) -> ProcessId {
        self.own
    }

    pub fn phase(&self) -> CrPhase {
        self.phase
    }

    pub fn is_participant(&self) -> bool {
        self.participant
    }

    /// Apply one inbound message. Chang-Roberts traffic only ever arrives
    /// from the predecessor, so no arrival direction is needed.
    pub fn handle(&mut self, msg: ProtocolMessage) -> Result<Effects, ProtocolViolation> {
        match msg {
            ProtocolMessage::CrElection { candidate } => self.on_election(candidate),
            ProtocolMessage::Coordinator { leader } => self.on_coordinator(leader),
            ProtocolMessage::FrToken { .. } => Err(ProtocolViolation::UnexpectedMessage {
                message: msg.to_string(),
                state: "chang-roberts node".into(),
            }),
        }
    }

    fn on_election(&mut self, candidate: ProcessId) -> Result<Effects, ProtocolViolation> {
        match self.phase {
            CrPhase::Idle | CrPhase::Electing => {}
            CrPhase::Leader | CrPhase::Follower(_) => {
                // Tokens cannot trail the announcement on FIFO channels.
                return Err(ProtocolViolation::UnexpectedMessage {
                    message: format!("election({candidate})"),
                    state: format!("{:?}", self.phase),
                });
            }
        }

        if candidate > self.own {
            self.participant = true;
            self.phase = CrPhase::Electing;
            return Ok(Effects::none().send(
                TOKEN_DIRECTION,
                ProtocolMessage::CrElection { candidate },
            ));
        }

        if candidate < self.own {
            if self.participant {
                // Swallow: own (or a larger) candidacy is already in flight.
                return Ok(Effects::none());
            }
            self.participant = true;
            self.phase = CrPhase::Electing;
            return Ok(Effects::none().send(
                TOKEN_DIRECTION,
                ProtocolMessage::CrElection { candidate: self.own },
            ));
        }

        // candidate == own: the candidacy survived a full loop.
        if self.phase == CrPhase::Idle {
            return Err(ProtocolViolation::OwnTokenWhileIdle { own: self.own });
        }
        self.phase = CrPhase::Leader;
        let mut effects = Effects::none().emit(NodeEvent::BecameLeader { leader: self.own });
        if self.announce {
            effects = effects.send(
                TOKEN_DIRECTION,
                ProtocolMessage::Coordinator { leader: self.own },
            );
        }
        Ok(effects)
    }

    fn on_coordinator(&mut self, leader: ProcessId) -> Result<Effects, ProtocolViolation> {
        if leader == self.own {
            // The announcement completed the ring.
            if self.phase == CrPhase::Leader {
                return Ok(Effects::none());
            }
            return Err(ProtocolViolation::UnexpectedMessage {
                message: format!("coordinator({leader})"),
                state: format!("{:?}", self.phase),
            });
        }
        match self.phase {
            CrPhase::Idle | CrPhase::Electing => {
                self.phase = CrPhase::Follower(leader);
                self.participant = false;
                Ok(Effects::none()
                    .emit(NodeEvent::LearnedLeader { leader })
                    .send(TOKEN_DIRECTION, ProtocolMessage::Coordinator { leader }))
            }
            CrPhase::Leader | CrPhase::Follower(_) => {
                Err(ProtocolViolation::UnexpectedMessage {
                    message: format!("coordinator({leader})"),
                    state: format!("{:?}", self.phase),
                })
            }
        }
    }
}
