//! Record schemas for each document kind. Key order here is the canonical
//! emission order.

use super::DocKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum IdKind {
    /// Identifier token, sorted lexicographically.
    Token,
    /// Positive integer, sorted numerically.
    Seq,
    /// Non-negative integer, sorted numerically.
    Uint,
    /// Concept code, sorted by tier then index.
    Code,
    /// `a~b` with `a < b`, sorted lexicographically.
    Pair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ValueKind {
    Token,
    /// Token or `-`.
    OptToken,
    Uint,
    /// Integer or `-`.
    OptUint,
    /// Finite real; re-rendered in shortest round-trip form.
    Real,
    Bool,
    /// `true`, `false` or a finite real (graded autonomy).
    Autonomy,
    Enum(&'static [&'static str]),
    /// Comma-separated tokens, order kept; `-` is the empty list.
    List,
    /// Comma-separated tokens of the given set, sorted and deduplicated.
    Set(&'static [&'static str]),
    /// Concept code or `-`.
    OptCode,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct KeySpec {
    pub name: &'static str,
    pub kind: ValueKind,
    pub required: bool,
}

#[derive(Debug)]
pub(crate) struct RecordSpec {
    pub name: &'static str,
    pub rank: u8,
    pub id: IdKind,
    pub keys: &'static [KeySpec],
}

impl RecordSpec {
    pub fn key(&self, name: &str) -> Option<(usize, &KeySpec)> {
        self.keys.iter().enumerate().find(|(_, k)| k.name == name)
    }
}

const fn req(name: &'static str, kind: ValueKind) -> KeySpec {
    KeySpec {
        name,
        kind,
        required: true,
    }
}

const fn opt(name: &'static str, kind: ValueKind) -> KeySpec {
    KeySpec {
        name,
        kind,
        required: false,
    }
}

pub(crate) const SPACES: &[&str] = &["cyber", "physical", "social", "mental"];
pub(crate) const EVENT_TYPES: &[&str] = &["existence", "policy", "attack", "defend"];
const KINDS: &[&str] = &["human", "agi", "cyberworld"];
const CLASSES: &[&str] = &["individual", "society", "swarm"];
const MATTER: &[&str] = &["organic", "inorganic"];
const VISIBILITY: &[&str] = &["visible", "invisible"];
const QUALITY: &[&str] = &["narrow", "general"];
const COMPOSITION: &[&str] = &["organic", "artificial"];
const INTENT: &[&str] = &["preemptive", "responsive"];
const PHASES: &[&str] = &["dormant", "established", "disturbed", "defended"];
const HALT_REASONS: &[&str] = &crate::sim::SimError::CODES;

const WORLD: RecordSpec = RecordSpec {
    name: "world",
    rank: 0,
    id: IdKind::Token,
    keys: &[req("spaces", ValueKind::Set(SPACES))],
};

const AGENT: RecordSpec = RecordSpec {
    name: "agent",
    rank: 1,
    id: IdKind::Token,
    keys: &[
        req("kind", ValueKind::Enum(KINDS)),
        req("class", ValueKind::Enum(CLASSES)),
        opt("matter", ValueKind::Enum(MATTER)),
        req("visibility", ValueKind::Enum(VISIBILITY)),
        req("hardware", ValueKind::List),
        req("software", ValueKind::List),
        opt("time", ValueKind::Uint),
        opt("space", ValueKind::Token),
        req("logic", ValueKind::Real),
        req("uncertainty", ValueKind::Real),
        opt("quality", ValueKind::Enum(QUALITY)),
        opt("composition", ValueKind::Enum(COMPOSITION)),
        req("autonomy", ValueKind::Autonomy),
    ],
};

const POLICY: RecordSpec = RecordSpec {
    name: "policy",
    rank: 2,
    id: IdKind::Token,
    keys: &[
        req("world", ValueKind::Token),
        req("predicate", ValueKind::Token),
        req("args", ValueKind::List),
    ],
};

const EVENT: RecordSpec = RecordSpec {
    name: "event",
    rank: 3,
    id: IdKind::Seq,
    keys: &[
        req("type", ValueKind::Enum(EVENT_TYPES)),
        opt("agent", ValueKind::Token),
        opt("policy", ValueKind::Token),
        opt("initiator", ValueKind::Token),
        opt("intent", ValueKind::Enum(INTENT)),
        opt("target", ValueKind::Token),
    ],
};

const STATE: RecordSpec = RecordSpec {
    name: "state",
    rank: 4,
    id: IdKind::Seq,
    keys: &[
        req("phase", ValueKind::Enum(PHASES)),
        req("k", ValueKind::Uint),
        req("equilibrium", ValueKind::Bool),
        req("pending", ValueKind::OptUint),
        req("violated", ValueKind::List),
    ],
};

const HALT: RecordSpec = RecordSpec {
    name: "halt",
    rank: 5,
    id: IdKind::Uint,
    keys: &[req("reason", ValueKind::Enum(HALT_REASONS))],
};

const CONCEPT: RecordSpec = RecordSpec {
    name: "concept",
    rank: 0,
    id: IdKind::Code,
    keys: &[
        req("descriptor", ValueKind::Token),
        req("parent", ValueKind::OptCode),
    ],
};

const TERM: RecordSpec = RecordSpec {
    name: "term",
    rank: 0,
    id: IdKind::Token,
    keys: &[
        req("frequency", ValueKind::Uint),
        req("documents", ValueKind::Uint),
        req("parent", ValueKind::OptToken),
    ],
};

const RELATION: RecordSpec = RecordSpec {
    name: "relation",
    rank: 1,
    id: IdKind::Pair,
    keys: &[req("weight", ValueKind::Uint)],
};

static SCENARIO_SPECS: [&RecordSpec; 4] = [&WORLD, &AGENT, &POLICY, &EVENT];
static TRACE_SPECS: [&RecordSpec; 6] = [&WORLD, &AGENT, &POLICY, &EVENT, &STATE, &HALT];
static CONCEPT_SPECS: [&RecordSpec; 1] = [&CONCEPT];
static CANDIDATE_SPECS: [&RecordSpec; 2] = [&TERM, &RELATION];

pub(crate) fn specs(kind: DocKind) -> &'static [&'static RecordSpec] {
    match kind {
        DocKind::Scenario => &SCENARIO_SPECS,
        DocKind::Trace => &TRACE_SPECS,
        DocKind::Concepts => &CONCEPT_SPECS,
        DocKind::Candidate => &CANDIDATE_SPECS,
    }
}

pub(crate) fn spec(kind: DocKind, record: &str) -> Option<&'static RecordSpec> {
    specs(kind).iter().copied().find(|s| s.name == record)
}

/// Identifier tokens: letters, digits, `_`, `-`, `.` and `:`; the bare `-`
/// is reserved for "none".
pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty()
        && s != "-"
        && s.chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':'))
}
