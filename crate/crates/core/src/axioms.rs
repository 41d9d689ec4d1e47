//! Machine-checkable axioms over agents, worlds and event traces.
//!
//! Checks never stop at the first problem: every violation found is
//! returned, sorted by axiom, then subject, then message.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{Agent, AgentKind, Composition, CyberWorld, Grouping, Intent, Matter, Space};
use crate::sim::{EventKind, RelationshipEvent};

/// The closed axiom catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomId {
    /// Humans, AGI and the cyber world are disjoint sorts.
    Ax1,
    /// Containment exists only in a cyber world.
    Ax2,
    /// Autonomy is binary.
    Ax3,
    /// Intelligence is grounded in a physical attribute set.
    Ax4,
    /// Security spectra are bounded in `[0, 1]`.
    Ax5,
    /// Active events follow passive existence and policy events.
    Ax6,
    /// An attack carries both initiation and intent.
    Ax7,
    /// Defence is responsive only.
    Ax8,
    /// Society groups humans, swarm groups AGI.
    Ax9,
}

impl AxiomId {
    pub const ALL: [AxiomId; 9] = [
        AxiomId::Ax1,
        AxiomId::Ax2,
        AxiomId::Ax3,
        AxiomId::Ax4,
        AxiomId::Ax5,
        AxiomId::Ax6,
        AxiomId::Ax7,
        AxiomId::Ax8,
        AxiomId::Ax9,
    ];

    pub fn code(self) -> &'static str {
        match self {
            AxiomId::Ax1 => "AX1",
            AxiomId::Ax2 => "AX2",
            AxiomId::Ax3 => "AX3",
            AxiomId::Ax4 => "AX4",
            AxiomId::Ax5 => "AX5",
            AxiomId::Ax6 => "AX6",
            AxiomId::Ax7 => "AX7",
            AxiomId::Ax8 => "AX8",
            AxiomId::Ax9 => "AX9",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            AxiomId::Ax1 => "agent-sort discreteness",
            AxiomId::Ax2 => "containment only in cyber world",
            AxiomId::Ax3 => "autonomy is binary",
            AxiomId::Ax4 => "intelligence is grounded in a physical attribute set",
            AxiomId::Ax5 => "security spectra bounded in [0,1]",
            AxiomId::Ax6 => "active events only after passive existence and policy events",
            AxiomId::Ax7 => "attack carries both initiation and intent",
            AxiomId::Ax8 => "defend intent is responsive only",
            AxiomId::Ax9 => "grouping/kind consistency",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// What a violation is about: an entity id or an event sequence number.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Entity(String),
    Event(u64),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Entity(id) => f.write_str(id),
            Subject::Event(seq) => write!(f, "#{seq}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub axiom: AxiomId,
    pub subject: Subject,
    pub message: String,
}

impl Violation {
    fn entity(axiom: AxiomId, id: &str, message: impl Into<String>) -> Self {
        Violation {
            axiom,
            subject: Subject::Entity(id.to_string()),
            message: message.into(),
        }
    }

    fn event(axiom: AxiomId, seq: u64, message: impl Into<String>) -> Self {
        Violation {
            axiom,
            subject: Subject::Event(seq),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.axiom, self.subject, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("event sequence {current} does not exceed preceding {previous}")]
    NonMonotonicSequence { previous: u64, current: u64 },
}

fn sorted(mut v: Vec<Violation>) -> Vec<Violation> {
    v.sort();
    v
}

fn in_unit_interval(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Checks AX3, AX4, AX5 and AX9 for a single agent.
pub fn validate_agent(agent: &Agent) -> Vec<Violation> {
    let mut out = Vec::new();
    let id = agent.id.as_str();
    let abs = &agent.abstract_attrs;

    if !abs.autonomy.is_binary() {
        out.push(Violation::entity(
            AxiomId::Ax3,
            id,
            "autonomy must be true or false, found a graded value",
        ));
    }

    if abs.intelligence.is_some() {
        if agent.physical.matter.is_none() {
            out.push(Violation::entity(
                AxiomId::Ax4,
                id,
                "intelligent agent has no matter",
            ));
        }
        if agent.physical.locality.is_none() {
            out.push(Violation::entity(
                AxiomId::Ax4,
                id,
                "intelligent agent has no locality",
            ));
        }
    }

    for (name, value) in [
        ("logic", abs.security.logic),
        ("uncertainty", abs.security.uncertainty),
    ] {
        if !in_unit_interval(value) {
            out.push(Violation::entity(
                AxiomId::Ax5,
                id,
                format!("security {name} {value} outside [0,1]"),
            ));
        }
    }

    let required_kind = match agent.grouping {
        Grouping::Society => Some(AgentKind::Human),
        Grouping::Swarm => Some(AgentKind::Agi),
        Grouping::Individual => None,
    };
    if let Some(kind) = required_kind {
        if agent.kind != kind {
            out.push(Violation::entity(
                AxiomId::Ax9,
                id,
                format!(
                    "grouping {} requires kind {kind}, found {}",
                    agent.grouping, agent.kind
                ),
            ));
        }
    }

    sorted(out)
}

/// Sort checks for one agent inside `world`: agents are neither the world
/// nor of the wrong make-up for their kind.
fn agent_sort_violations(world: &CyberWorld, agent: &Agent) -> Vec<Violation> {
    let mut out = Vec::new();
    let id = agent.id.as_str();
    if agent.kind == AgentKind::CyberWorld {
        out.push(Violation::entity(
            AxiomId::Ax1,
            id,
            "an agent cannot be a cyber world",
        ));
    }
    if agent.id == world.id {
        out.push(Violation::entity(
            AxiomId::Ax1,
            id,
            "agent shares its id with the cyber world",
        ));
    }
    let composition = agent.abstract_attrs.intelligence.map(|i| i.composition);
    match agent.kind {
        AgentKind::Human => {
            if agent.physical.matter == Some(Matter::Inorganic) {
                out.push(Violation::entity(
                    AxiomId::Ax1,
                    id,
                    "human matter must be organic",
                ));
            }
            if composition == Some(Composition::Artificial) {
                out.push(Violation::entity(
                    AxiomId::Ax1,
                    id,
                    "human intelligence composition must be organic",
                ));
            }
        }
        AgentKind::Agi => {
            if composition == Some(Composition::Organic) {
                out.push(Violation::entity(
                    AxiomId::Ax1,
                    id,
                    "agi intelligence composition must be artificial",
                ));
            }
        }
        AgentKind::CyberWorld => {}
    }
    out
}

/// Per-agent checks for every agent plus AX1 sort checks, AX2 and policy
/// references.
pub fn validate_world(world: &CyberWorld) -> Vec<Violation> {
    let mut out = Vec::new();
    if !world.spaces.contains(&Space::Cyber) {
        out.push(Violation::entity(
            AxiomId::Ax2,
            &world.id,
            "world lacks the cyber space; containment cannot exist there",
        ));
    }
    for policy in world.policies.values() {
        if policy.world != world.id {
            out.push(Violation::entity(
                AxiomId::Ax2,
                &policy.id,
                format!(
                    "policy references world {} instead of {}",
                    policy.world, world.id
                ),
            ));
        }
    }
    for agent in world.agents.values() {
        out.extend(agent_sort_violations(world, agent));
        out.extend(validate_agent(agent));
    }
    sorted(out)
}

/// Checks AX6, AX7 and AX8 over an ordered event list.
pub fn validate_trace(events: &[RelationshipEvent]) -> Result<Vec<Violation>, TraceError> {
    for pair in events.windows(2) {
        if pair[1].seq <= pair[0].seq {
            return Err(TraceError::NonMonotonicSequence {
                previous: pair[0].seq,
                current: pair[1].seq,
            });
        }
    }

    let mut out = Vec::new();
    let mut existence = false;
    let mut policy = false;
    for event in events {
        let seq = event.seq;
        match &event.kind {
            EventKind::Existence { .. } => existence = true,
            EventKind::Policy { .. } => policy = true,
            EventKind::Attack { .. } | EventKind::Defend { .. } => {
                if !(existence && policy) {
                    let missing = match (existence, policy) {
                        (false, false) => "existence and policy events",
                        (false, true) => "an existence event",
                        _ => "a policy event",
                    };
                    out.push(Violation::event(
                        AxiomId::Ax6,
                        seq,
                        format!("{} precedes {missing}", event.kind.name()),
                    ));
                }
            }
        }
        match &event.kind {
            EventKind::Attack {
                initiator, intent, ..
            } => {
                if initiator.is_none() {
                    out.push(Violation::event(
                        AxiomId::Ax7,
                        seq,
                        "attack has no initiator",
                    ));
                }
                if intent.is_none() {
                    out.push(Violation::event(AxiomId::Ax7, seq, "attack has no intent"));
                }
            }
            EventKind::Defend {
                intent: Some(Intent::Preemptive),
                ..
            } => {
                out.push(Violation::event(
                    AxiomId::Ax8,
                    seq,
                    "preemptive defend is an attack; defend must be responsive",
                ));
            }
            _ => {}
        }
    }
    Ok(sorted(out))
}

/// Everything the validator reports for a world plus its event list.
///
/// On top of [`validate_world`] and [`validate_trace`], an active event
/// whose initiator is the world itself is an AX1 violation: only human or
/// AGI agents initiate.
pub fn validate_scenario(
    world: &CyberWorld,
    events: &[RelationshipEvent],
) -> Result<Vec<Violation>, TraceError> {
    let mut out = validate_trace(events)?;
    out.extend(validate_world(world));
    let mut flagged = BTreeSet::new();
    for event in events {
        if let Some(initiator) = event.kind.initiator() {
            if initiator == world.id && flagged.insert(event.seq) {
                out.push(Violation::event(
                    AxiomId::Ax1,
                    event.seq,
                    "the cyber world cannot initiate an active event",
                ));
            }
        }
    }
    Ok(sorted(out))
}
