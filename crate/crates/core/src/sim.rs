//! Event-sourced attack/defend state machine.
//!
//! Passive events (existence, policy) establish the environment. Each
//! successful attack advances the knowledge state `k` by exactly one and
//! leaves the world disturbed; a defend by a different agent restores
//! equilibrium. Only one attack may be pending at a time.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::axioms::{validate_world, Violation};
use crate::model::{AgentKind, CyberWorld, Intent};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    Existence {
        agent: String,
    },
    Policy {
        policy: String,
    },
    /// Both fields are optional so incomplete input can be reported; the
    /// simulator rejects an attack missing either.
    Attack {
        initiator: Option<String>,
        intent: Option<Intent>,
        target: String,
    },
    /// Defence is responsive by construction. `intent` records what the
    /// input declared; a preemptive defend is rejected.
    Defend {
        initiator: String,
        target: String,
        intent: Option<Intent>,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Existence { .. } => "existence",
            EventKind::Policy { .. } => "policy",
            EventKind::Attack { .. } => "attack",
            EventKind::Defend { .. } => "defend",
        }
    }

    pub fn is_active(&self) -> bool {
        matches!(self, EventKind::Attack { .. } | EventKind::Defend { .. })
    }

    pub fn initiator(&self) -> Option<&str> {
        match self {
            EventKind::Attack { initiator, .. } => initiator.as_deref(),
            EventKind::Defend { initiator, .. } => Some(initiator),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationshipEvent {
    pub seq: u64,
    pub kind: EventKind,
}

impl RelationshipEvent {
    pub fn new(seq: u64, kind: EventKind) -> Self {
        Self { seq, kind }
    }
}

token_enum!(Phase, "phase" {
    Dormant => "dormant",
    Established => "established",
    Disturbed => "disturbed",
    Defended => "defended",
});

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingAttack {
    pub seq: u64,
    pub initiator: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub world: CyberWorld,
    pub phase: Phase,
    pub pending_attack: Option<PendingAttack>,
    pub violated_policies: BTreeSet<String>,
    pub equilibrium: bool,
    /// Agents that have had an existence event.
    pub existing: BTreeSet<String>,
    /// Policies that have had a policy event.
    pub enacted: BTreeSet<String>,
    pub last_seq: Option<u64>,
}

impl WorldState {
    pub fn k(&self) -> u64 {
        self.world.k
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("world fails validation with {} violation(s)", .0.len())]
    InvalidWorld(Vec<Violation>),
    #[error("event {seq} does not follow previously applied event {last}")]
    StaleSequence { seq: u64, last: u64 },
    #[error("event {seq}: {reason}")]
    OrderingViolation { seq: u64, reason: String },
    #[error("event {seq}: defender {agent} is the pending attacker")]
    SelfDefense { seq: u64, agent: String },
    #[error("event {seq}: a preemptive defend is an attack and is rejected")]
    PreemptiveDefense { seq: u64 },
    #[error("event {seq}: attack lacks initiator or intent")]
    IncompleteAttack { seq: u64 },
    #[error("event {seq}: unknown agent {agent}")]
    UnknownAgent { seq: u64, agent: String },
    #[error("event {seq}: unknown policy {policy}")]
    UnknownPolicy { seq: u64, policy: String },
    #[error("event {seq}: defend targets {found} but the pending attack targets {expected}")]
    TargetMismatch {
        seq: u64,
        expected: String,
        found: String,
    },
}

impl SimError {
    /// Stable token used in serialized traces.
    pub fn code(&self) -> &'static str {
        match self {
            SimError::InvalidWorld(_) => "invalid_world",
            SimError::StaleSequence { .. } => "stale_sequence",
            SimError::OrderingViolation { .. } => "ordering_violation",
            SimError::SelfDefense { .. } => "self_defense",
            SimError::PreemptiveDefense { .. } => "preemptive_defense",
            SimError::IncompleteAttack { .. } => "incomplete_attack",
            SimError::UnknownAgent { .. } => "unknown_agent",
            SimError::UnknownPolicy { .. } => "unknown_policy",
            SimError::TargetMismatch { .. } => "target_mismatch",
        }
    }

    pub const CODES: [&'static str; 9] = [
        "invalid_world",
        "stale_sequence",
        "ordering_violation",
        "self_defense",
        "preemptive_defense",
        "incomplete_attack",
        "unknown_agent",
        "unknown_policy",
        "target_mismatch",
    ];
}

/// Validates `world` and returns its dormant initial state.
pub fn init_world(world: CyberWorld) -> Result<WorldState, SimError> {
    let violations = validate_world(&world);
    if !violations.is_empty() {
        return Err(SimError::InvalidWorld(violations));
    }
    Ok(WorldState {
        world,
        phase: Phase::Dormant,
        pending_attack: None,
        violated_policies: BTreeSet::new(),
        equilibrium: false,
        existing: BTreeSet::new(),
        enacted: BTreeSet::new(),
        last_seq: None,
    })
}

fn known_agent(state: &WorldState, seq: u64, id: &str) -> Result<(), SimError> {
    match state.world.agents.get(id) {
        Some(a) if a.kind != AgentKind::CyberWorld => Ok(()),
        _ => Err(SimError::UnknownAgent {
            seq,
            agent: id.to_string(),
        }),
    }
}

fn known_policy(state: &WorldState, seq: u64, id: &str) -> Result<(), SimError> {
    if state.world.policies.contains_key(id) {
        Ok(())
    } else {
        Err(SimError::UnknownPolicy {
            seq,
            policy: id.to_string(),
        })
    }
}

/// Applies one event, returning the successor state. The input state is
/// never modified, so a rejected event leaves no trace in it.
pub fn apply_event(state: &WorldState, event: &RelationshipEvent) -> Result<WorldState, SimError> {
    let seq = event.seq;
    if let Some(last) = state.last_seq {
        if seq <= last {
            return Err(SimError::StaleSequence { seq, last });
        }
    }

    let mut next = state.clone();
    next.last_seq = Some(seq);
    match &event.kind {
        EventKind::Existence { agent } => {
            known_agent(state, seq, agent)?;
            next.existing.insert(agent.clone());
            next.establish_if_ready();
        }
        EventKind::Policy { policy } => {
            known_policy(state, seq, policy)?;
            next.enacted.insert(policy.clone());
            next.establish_if_ready();
        }
        EventKind::Attack {
            initiator,
            intent,
            target,
        } => {
            let (Some(initiator), Some(_)) = (initiator, intent) else {
                return Err(SimError::IncompleteAttack { seq });
            };
            known_agent(state, seq, initiator)?;
            known_policy(state, seq, target)?;
            match state.phase {
                Phase::Established | Phase::Defended => {}
                Phase::Dormant => {
                    return Err(SimError::OrderingViolation {
                        seq,
                        reason: "attack before existence and policy events".into(),
                    })
                }
                Phase::Disturbed => {
                    return Err(SimError::OrderingViolation {
                        seq,
                        reason: "attack while another attack is pending".into(),
                    })
                }
            }
            next.phase = Phase::Disturbed;
            next.equilibrium = false;
            next.world.k += 1;
            next.violated_policies.insert(target.clone());
            next.pending_attack = Some(PendingAttack {
                seq,
                initiator: initiator.clone(),
                target: target.clone(),
            });
        }
        EventKind::Defend {
            initiator,
            target,
            intent,
        } => {
            if *intent == Some(Intent::Preemptive) {
                return Err(SimError::PreemptiveDefense { seq });
            }
            known_agent(state, seq, initiator)?;
            known_policy(state, seq, target)?;
            let pending = match (&state.phase, &state.pending_attack) {
                (Phase::Disturbed, Some(p)) => p,
                _ => {
                    return Err(SimError::OrderingViolation {
                        seq,
                        reason: format!("defend with no pending attack (phase {})", state.phase),
                    })
                }
            };
            if *initiator == pending.initiator {
                return Err(SimError::SelfDefense {
                    seq,
                    agent: initiator.clone(),
                });
            }
            if *target != pending.target {
                return Err(SimError::TargetMismatch {
                    seq,
                    expected: pending.target.clone(),
                    found: target.clone(),
                });
            }
            next.violated_policies.remove(target);
            next.pending_attack = None;
            next.phase = Phase::Defended;
            next.equilibrium = true;
        }
    }
    Ok(next)
}

impl WorldState {
    fn establish_if_ready(&mut self) {
        if self.phase == Phase::Dormant && !self.existing.is_empty() && !self.enacted.is_empty() {
            self.phase = Phase::Established;
            self.equilibrium = true;
        }
    }
}

/// Why a run stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct Halt {
    /// The rejected event; `None` when the world itself failed to initialise.
    pub event: Option<RelationshipEvent>,
    pub error: SimError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// State before any event; `None` when initialisation failed.
    pub initial: Option<WorldState>,
    /// Successfully applied events.
    pub events: Vec<RelationshipEvent>,
    /// One snapshot per applied event.
    pub states: Vec<WorldState>,
    pub halt: Option<Halt>,
}

impl Trace {
    pub fn final_state(&self) -> Option<&WorldState> {
        self.states.last().or(self.initial.as_ref())
    }

    pub fn successful_attacks(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e.kind, EventKind::Attack { .. }))
            .count()
    }
}

/// Folds `events` over the initial state of `world`, stopping at the first
/// rejected event.
pub fn run(world: CyberWorld, events: &[RelationshipEvent]) -> Trace {
    let mut state = match init_world(world) {
        Ok(s) => s,
        Err(error) => {
            return Trace {
                initial: None,
                events: Vec::new(),
                states: Vec::new(),
                halt: Some(Halt { event: None, error }),
            }
        }
    };
    let initial = state.clone();
    let mut applied = Vec::new();
    let mut states = Vec::new();
    let mut halt = None;
    for event in events {
        match apply_event(&state, event) {
            Ok(next) => {
                applied.push(event.clone());
                states.push(next.clone());
                state = next;
            }
            Err(error) => {
                halt = Some(Halt {
                    event: Some(event.clone()),
                    error,
                });
                break;
            }
        }
    }
    Trace {
        initial: Some(initial),
        events: applied,
        states,
        halt,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// No attack ever disturbed the world.
    Prevention,
    /// Attacks happened but the world ended back in equilibrium.
    Equilibrium,
    None,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Prevention => "Prevention",
            Clause::Equilibrium => "Equilibrium",
            Clause::None => "None",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainmentVerdict {
    pub holds: bool,
    pub clause: Clause,
    pub explanation: String,
}

pub fn containment_verdict(trace: &Trace) -> ContainmentVerdict {
    let fails = |explanation: String| ContainmentVerdict {
        holds: false,
        clause: Clause::None,
        explanation,
    };
    let Some(last) = trace.final_state() else {
        let reason = trace
            .halt
            .as_ref()
            .map(|h| h.error.to_string())
            .unwrap_or_default();
        return fails(format!("world could not be initialised: {reason}"));
    };

    let attacks = trace.successful_attacks();
    if attacks == 0 {
        let explanation = match &trace.halt {
            Some(Halt {
                event: Some(e),
                error,
            }) if matches!(e.kind, EventKind::Attack { .. }) => {
                format!(
                    "attack {} rejected before disturbing the world ({})",
                    e.seq,
                    error.code()
                )
            }
            _ => "no attack disturbed the world".to_string(),
        };
        return ContainmentVerdict {
            holds: true,
            clause: Clause::Prevention,
            explanation,
        };
    }

    if last.equilibrium && last.violated_policies.is_empty() {
        ContainmentVerdict {
            holds: true,
            clause: Clause::Equilibrium,
            explanation: format!(
                "{attacks} attack(s) answered; equilibrium restored at k={}",
                last.k()
            ),
        }
    } else {
        let violated: Vec<&str> = last.violated_policies.iter().map(String::as_str).collect();
        fails(format!(
            "world left {} at k={} with violated policies [{}]",
            last.phase,
            last.k(),
            violated.join(",")
        ))
    }
}
