//! Typed views over documents: scenarios, concept graphs, traces and
//! candidate ontologies.

use std::collections::BTreeMap;
use std::str::FromStr;

use thiserror::Error;

use super::{list, DocKind, Document, ParseErrors, Record, Writer};
use crate::corpus::{build_morphologies, CandidateConcept, CandidateOntology, CandidateRelation};
use crate::model::{
    AbstractAttributes, Agent, Autonomy, CyberWorld, Intelligence, Locality, PhysicalAttributes,
    Policy, Security, Space,
};
use crate::ontology::{ConceptCode, ConceptGraph, GraphError};
use crate::sim::{EventKind, RelationshipEvent, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("expected a {expected} document, found {found}")]
    WrongKind { expected: DocKind, found: DocKind },
    #[error("{record} {id}: {message}")]
    Invalid {
        record: String,
        id: String,
        message: String,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn expect_kind(doc: &Document, expected: DocKind) -> Result<(), ConvertError> {
    if doc.kind() == expected {
        Ok(())
    } else {
        Err(ConvertError::WrongKind {
            expected,
            found: doc.kind(),
        })
    }
}

fn invalid(r: &Record, message: impl Into<String>) -> ConvertError {
    ConvertError::Invalid {
        record: r.record_type().to_string(),
        id: r.id().to_string(),
        message: message.into(),
    }
}

fn opt<T: FromStr>(r: &Record, key: &str) -> Result<Option<T>, ConvertError> {
    match r.get(key) {
        None | Some("-") => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| invalid(r, format!("bad value for `{key}`"))),
    }
}

fn req<T: FromStr>(r: &Record, key: &str) -> Result<T, ConvertError> {
    opt(r, key)?.ok_or_else(|| invalid(r, format!("missing `{key}`")))
}

fn tokens(r: &Record, key: &str) -> Vec<String> {
    match r.get(key) {
        None | Some("-") => Vec::new(),
        Some(v) => v.split(',').map(str::to_string).collect(),
    }
}

fn id_num(r: &Record) -> Result<u64, ConvertError> {
    r.id()
        .parse()
        .map_err(|_| invalid(r, "id is not an integer"))
}

/// A world definition plus the events to run against it.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub world: CyberWorld,
    pub events: Vec<RelationshipEvent>,
}

fn agent_from(r: &Record) -> Result<Agent, ConvertError> {
    let locality = match (opt::<u64>(r, "time")?, opt::<String>(r, "space")?) {
        (Some(time), Some(space)) => Some(Locality { time, space }),
        _ => None,
    };
    let intelligence = match (opt(r, "quality")?, opt(r, "composition")?) {
        (Some(quality), Some(composition)) => Some(Intelligence {
            quality,
            composition,
        }),
        _ => None,
    };
    let autonomy = match r.get("autonomy") {
        Some("true") => Autonomy::Autonomous,
        Some("false") => Autonomy::NotAutonomous,
        _ => Autonomy::Graded(req(r, "autonomy")?),
    };
    Ok(Agent {
        id: r.id().to_string(),
        kind: req(r, "kind")?,
        grouping: req(r, "class")?,
        physical: PhysicalAttributes {
            matter: opt(r, "matter")?,
            visibility: req(r, "visibility")?,
            hardware: tokens(r, "hardware"),
            software: tokens(r, "software"),
            locality,
        },
        abstract_attrs: AbstractAttributes {
            security: Security {
                logic: req(r, "logic")?,
                uncertainty: req(r, "uncertainty")?,
            },
            intelligence,
            autonomy,
        },
    })
}

fn event_from(r: &Record) -> Result<RelationshipEvent, ConvertError> {
    let ty: String = req(r, "type")?;
    let kind = match ty.as_str() {
        "existence" => EventKind::Existence {
            agent: req(r, "agent")?,
        },
        "policy" => EventKind::Policy {
            policy: req(r, "policy")?,
        },
        "attack" => EventKind::Attack {
            initiator: opt(r, "initiator")?,
            intent: opt(r, "intent")?,
            target: req(r, "target")?,
        },
        "defend" => EventKind::Defend {
            initiator: req(r, "initiator")?,
            target: req(r, "target")?,
            intent: opt(r, "intent")?,
        },
        other => return Err(invalid(r, format!("unknown event type {other}"))),
    };
    Ok(RelationshipEvent {
        seq: id_num(r)?,
        kind,
    })
}

fn world_from(doc: &Document) -> Result<CyberWorld, ConvertError> {
    let w = doc
        .records_of("world")
        .next()
        .ok_or_else(|| ConvertError::Invalid {
            record: "world".into(),
            id: "-".into(),
            message: "document has no world".into(),
        })?;
    let spaces = tokens(w, "spaces")
        .iter()
        .map(|s| s.parse().map_err(|_| invalid(w, format!("bad space {s}"))))
        .collect::<Result<Vec<Space>, _>>()?;
    let mut world = CyberWorld::new(w.id(), spaces);
    for r in doc.records_of("agent") {
        world.agents.insert(r.id().to_string(), agent_from(r)?);
    }
    for r in doc.records_of("policy") {
        world.policies.insert(
            r.id().to_string(),
            Policy {
                id: r.id().to_string(),
                world: req(r, "world")?,
                predicate: req(r, "predicate")?,
                args: tokens(r, "args"),
            },
        );
    }
    Ok(world)
}

fn real(x: f64) -> String {
    x.to_string()
}

fn write_world(w: &mut Writer, world: &CyberWorld) {
    let spaces: Vec<String> = world.spaces.iter().map(|s| s.to_string()).collect();
    w.record("world", &world.id, [("spaces", Some(list(&spaces)))]);
    for a in world.agents.values() {
        let p = &a.physical;
        let abs = &a.abstract_attrs;
        let autonomy = match abs.autonomy {
            Autonomy::Autonomous => "true".to_string(),
            Autonomy::NotAutonomous => "false".to_string(),
            Autonomy::Graded(x) => real(x),
        };
        w.record(
            "agent",
            &a.id,
            [
                ("kind", Some(a.kind.to_string())),
                ("class", Some(a.grouping.to_string())),
                ("matter", p.matter.map(|m| m.to_string())),
                ("visibility", Some(p.visibility.to_string())),
                ("hardware", Some(list(&p.hardware))),
                ("software", Some(list(&p.software))),
                ("time", p.locality.as_ref().map(|l| l.time.to_string())),
                ("space", p.locality.as_ref().map(|l| l.space.clone())),
                ("logic", Some(real(abs.security.logic))),
                ("uncertainty", Some(real(abs.security.uncertainty))),
                ("quality", abs.intelligence.map(|i| i.quality.to_string())),
                (
                    "composition",
                    abs.intelligence.map(|i| i.composition.to_string()),
                ),
                ("autonomy", Some(autonomy)),
            ],
        );
    }
    for p in world.policies.values() {
        w.record(
            "policy",
            &p.id,
            [
                ("world", Some(p.world.clone())),
                ("predicate", Some(p.predicate.clone())),
                ("args", Some(list(&p.args))),
            ],
        );
    }
}

fn write_event(w: &mut Writer, e: &RelationshipEvent) {
    let s = |v: &str| Some(v.to_string());
    let seq = e.seq.to_string();
    match &e.kind {
        EventKind::Existence { agent } => w.record(
            "event",
            &seq,
            [("type", s("existence")), ("agent", s(agent))],
        ),
        EventKind::Policy { policy } => w.record(
            "event",
            &seq,
            [("type", s("policy")), ("policy", s(policy))],
        ),
        EventKind::Attack {
            initiator,
            intent,
            target,
        } => w.record(
            "event",
            &seq,
            [
                ("type", s("attack")),
                ("initiator", initiator.clone()),
                ("intent", intent.map(|i| i.to_string())),
                ("target", s(target)),
            ],
        ),
        EventKind::Defend {
            initiator,
            target,
            intent,
        } => w.record(
            "event",
            &seq,
            [
                ("type", s("defend")),
                ("initiator", s(initiator)),
                ("intent", intent.map(|i| i.to_string())),
                ("target", s(target)),
            ],
        ),
    }
}

impl Scenario {
    pub fn from_document(doc: &Document) -> Result<Self, ConvertError> {
        expect_kind(doc, DocKind::Scenario)?;
        let world = world_from(doc)?;
        let events = doc
            .records_of("event")
            .map(event_from)
            .collect::<Result<_, _>>()?;
        Ok(Scenario { world, events })
    }

    pub fn to_document(&self) -> Result<Document, ParseErrors> {
        let mut w = Writer::new(DocKind::Scenario);
        write_world(&mut w, &self.world);
        for e in &self.events {
            write_event(&mut w, e);
        }
        w.finish()
    }
}

/// Canonical trace document: the world definition, every event the run
/// looked at (including a rejected one), one state per applied event, and a
/// `halt` record when the run stopped early (id 0 for a world that failed
/// to initialise).
pub fn trace_to_document(world: &CyberWorld, trace: &Trace) -> Result<Document, ParseErrors> {
    let mut w = Writer::new(DocKind::Trace);
    write_world(&mut w, world);
    for e in &trace.events {
        write_event(&mut w, e);
    }
    if let Some(e) = trace.halt.as_ref().and_then(|h| h.event.as_ref()) {
        // A stale event reusing an applied sequence number is only named by
        // the halt record.
        if trace.events.iter().all(|a| a.seq != e.seq) {
            write_event(&mut w, e);
        }
    }
    for (e, s) in trace.events.iter().zip(&trace.states) {
        let violated: Vec<String> = s.violated_policies.iter().cloned().collect();
        w.record(
            "state",
            &e.seq.to_string(),
            [
                ("phase", Some(s.phase.to_string())),
                ("k", Some(s.k().to_string())),
                ("equilibrium", Some(s.equilibrium.to_string())),
                (
                    "pending",
                    Some(
                        s.pending_attack
                            .as_ref()
                            .map_or("-".to_string(), |p| p.seq.to_string()),
                    ),
                ),
                ("violated", Some(list(&violated))),
            ],
        );
    }
    if let Some(h) = &trace.halt {
        let id = h.event.as_ref().map_or(0, |e| e.seq).to_string();
        w.record("halt", &id, [("reason", Some(h.error.code().to_string()))]);
    }
    w.finish()
}

pub fn concept_graph_to_document(graph: &ConceptGraph) -> Result<Document, ParseErrors> {
    let mut w = Writer::new(DocKind::Concepts);
    for c in graph.concepts() {
        w.record(
            "concept",
            &c.code.to_string(),
            [
                ("descriptor", Some(c.descriptor.clone())),
                (
                    "parent",
                    Some(c.parent.map_or("-".to_string(), |p| p.to_string())),
                ),
            ],
        );
    }
    w.finish()
}

pub fn concept_graph_from_document(doc: &Document) -> Result<ConceptGraph, ConvertError> {
    expect_kind(doc, DocKind::Concepts)?;
    let entries = doc
        .records_of("concept")
        .map(|r| {
            let code: ConceptCode = r.id().parse().map_err(|_| invalid(r, "bad concept code"))?;
            Ok((
                code,
                req::<String>(r, "descriptor")?,
                opt::<ConceptCode>(r, "parent")?,
            ))
        })
        .collect::<Result<Vec<_>, ConvertError>>()?;
    Ok(ConceptGraph::from_entries(entries)?)
}

pub fn candidate_to_document(c: &CandidateOntology) -> Result<Document, ParseErrors> {
    let mut w = Writer::new(DocKind::Candidate);
    for concept in &c.concepts {
        let parent = c.morphologies.tree.get(&concept.term).cloned().flatten();
        w.record(
            "term",
            &concept.term,
            [
                ("frequency", Some(concept.frequency.to_string())),
                ("documents", Some(concept.document_count.to_string())),
                ("parent", Some(parent.unwrap_or_else(|| "-".to_string()))),
            ],
        );
    }
    for r in &c.relations {
        w.record(
            "relation",
            &format!("{}~{}", r.term_a, r.term_b),
            [("weight", Some(r.weight.to_string()))],
        );
    }
    w.finish()
}

/// Rebuilds a candidate ontology. The stored tree must agree with the one
/// recomputed from the concepts and relations.
pub fn candidate_from_document(doc: &Document) -> Result<CandidateOntology, ConvertError> {
    expect_kind(doc, DocKind::Candidate)?;
    let mut concepts = Vec::new();
    let mut stored_tree = BTreeMap::new();
    for r in doc.records_of("term") {
        let frequency: u64 = req(r, "frequency")?;
        let document_count: u64 = req(r, "documents")?;
        if document_count == 0 || frequency < document_count {
            return Err(invalid(r, "need frequency >= documents >= 1"));
        }
        stored_tree.insert(r.id().to_string(), opt::<String>(r, "parent")?);
        concepts.push(CandidateConcept {
            term: r.id().to_string(),
            frequency,
            document_count,
        });
    }
    let mut relations = Vec::new();
    for r in doc.records_of("relation") {
        let (a, b) = r
            .id()
            .split_once('~')
            .ok_or_else(|| invalid(r, "bad pair"))?;
        let weight: u64 = req(r, "weight")?;
        if weight == 0 {
            return Err(invalid(r, "weight must be positive"));
        }
        relations.push(CandidateRelation {
            term_a: a.to_string(),
            term_b: b.to_string(),
            weight,
        });
    }
    concepts.sort_by(|x, y| {
        y.frequency
            .cmp(&x.frequency)
            .then_with(|| x.term.cmp(&y.term))
    });
    relations.sort_by(|x, y| {
        y.weight
            .cmp(&x.weight)
            .then_with(|| x.term_a.cmp(&y.term_a))
            .then_with(|| x.term_b.cmp(&y.term_b))
    });
    let morphologies = build_morphologies(&concepts, &relations);
    if morphologies.tree != stored_tree {
        return Err(ConvertError::Invalid {
            record: "term".into(),
            id: "-".into(),
            message: "stored parents disagree with the frequency-directed tree".into(),
        });
    }
    Ok(CandidateOntology {
        concepts,
        relations,
        morphologies,
    })
}
