//! The coded concept hierarchy.
//!
//! Every concept carries a [`ConceptCode`] made of a tier letter and a
//! 1-based index (`O2`, `C7`, `S4`, ...). The canonical instance returned by
//! [`canonical_ontology`] is a fixed forest with seven roots: the three
//! objects, the two attributes and the two relationship kinds.
//!
//! Sub-attribute (`S`) and feature (`F`) indices follow the reading order of
//! the attribute and relationship prose:
//!
//! | code | descriptor    | parent |   | code | descriptor   | parent |
//! |------|---------------|--------|---|------|--------------|--------|
//! | S1   | composition   | A1     |   | F1   | matter       | S1     |
//! | S2   | architecture  | A1     |   | F2   | visibility   | S1     |
//! | S3   | locality      | A1     |   | F3   | hardware     | S2     |
//! | S4   | security      | A2     |   | F4   | software     | S2     |
//! | S5   | intelligence  | A2     |   | F5   | temporal     | S3     |
//! | S6   | autonomy      | A2     |   | F6   | spatial      | S3     |
//! | S7   | existence     | R1     |   | F7   | logic        | S4     |
//! | S8   | policy        | R1     |   | F8   | uncertainty  | S4     |
//! | S9   | attack        | R2     |   | F9   | quality      | S5     |
//! | S10  | defend        | R2     |   | F10  | composition  | S5     |
//! |      |               |        |   | F11  | initiation   | S9     |
//! |      |               |        |   | F12  | intent       | S9     |
//! |      |               |        |   | F13  | reinitiation | S10    |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Level of a concept in the tiered hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    Object,
    Class,
    Attribute,
    SubAttribute,
    Feature,
    Relationship,
}

impl Tier {
    pub const ALL: [Tier; 6] = [
        Tier::Object,
        Tier::Class,
        Tier::Attribute,
        Tier::SubAttribute,
        Tier::Feature,
        Tier::Relationship,
    ];

    pub fn letter(self) -> char {
        match self {
            Tier::Object => 'O',
            Tier::Class => 'C',
            Tier::Attribute => 'A',
            Tier::SubAttribute => 'S',
            Tier::Feature => 'F',
            Tier::Relationship => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Tier> {
        Tier::ALL.into_iter().find(|t| t.letter() == c)
    }

    /// Largest index a code of this tier may carry.
    pub fn max_index(self) -> u32 {
        match self {
            Tier::Object => 3,
            Tier::Class => 7,
            Tier::Attribute => 2,
            Tier::SubAttribute => 10,
            Tier::Feature => 13,
            Tier::Relationship => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("empty concept code")]
    Empty,
    #[error("unknown tier letter {0:?} in concept code")]
    UnknownTier(char),
    #[error("malformed index in concept code {0:?}")]
    MalformedIndex(String),
    #[error("index {index} out of range 1..={max} for tier {tier}")]
    OutOfRange { tier: char, index: u32, max: u32 },
}

/// Tier letter plus index, e.g. `O2` or `S10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptCode {
    tier: Tier,
    index: u32,
}

impl ConceptCode {
    pub fn new(tier: Tier, index: u32) -> Result<Self, CodeError> {
        let max = tier.max_index();
        if index == 0 || index > max {
            return Err(CodeError::OutOfRange {
                tier: tier.letter(),
                index,
                max,
            });
        }
        Ok(Self { tier, index })
    }

    pub fn tier(self) -> Tier {
        self.tier
    }

    pub fn index(self) -> u32 {
        self.index
    }
}

impl fmt::Display for ConceptCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.tier.letter(), self.index)
    }
}

impl FromStr for ConceptCode {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let letter = chars.next().ok_or(CodeError::Empty)?;
        let tier = Tier::from_letter(letter).ok_or(CodeError::UnknownTier(letter))?;
        let digits = chars.as_str();
        // Reject signs, whitespace and leading zeros so rendering is a bijection.
        if digits.is_empty()
            || !digits.bytes().all(|b| b.is_ascii_digit())
            || digits.starts_with('0')
        {
            return Err(CodeError::MalformedIndex(s.to_string()));
        }
        let index: u32 = digits
            .parse()
            .map_err(|_| CodeError::MalformedIndex(s.to_string()))?;
        ConceptCode::new(tier, index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub code: ConceptCode,
    pub descriptor: String,
    pub parent: Option<ConceptCode>,
    pub children: Vec<ConceptCode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown concept code {0}")]
    UnknownCode(ConceptCode),
    #[error("concept {0} declared twice")]
    DuplicateCode(ConceptCode),
    #[error("descriptor {descriptor:?} used by both {first} and {second}")]
    DuplicateDescriptor {
        descriptor: String,
        first: ConceptCode,
        second: ConceptCode,
    },
    #[error("concept {child} names missing parent {parent}")]
    MissingParent {
        child: ConceptCode,
        parent: ConceptCode,
    },
    #[error("parent chain through {0} forms a cycle")]
    Cycle(ConceptCode),
}

/// Immutable parent/child forest of coded concepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptGraph {
    concepts: BTreeMap<ConceptCode, Concept>,
    roots: Vec<ConceptCode>,
}

impl ConceptGraph {
    /// Builds a graph from `(code, descriptor, parent)` triples, deriving the
    /// child lists and checking descriptor uniqueness and acyclicity.
    pub fn from_entries<I, S>(entries: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (ConceptCode, S, Option<ConceptCode>)>,
        S: Into<String>,
    {
        let mut concepts = BTreeMap::new();
        let mut seen: BTreeMap<(Tier, String), ConceptCode> = BTreeMap::new();
        for (code, descriptor, parent) in entries {
            let descriptor = descriptor.into();
            if let Some(first) = seen.insert((code.tier(), descriptor.clone()), code) {
                return Err(GraphError::DuplicateDescriptor {
                    descriptor,
                    first,
                    second: code,
                });
            }
            let concept = Concept {
                code,
                descriptor,
                parent,
                children: Vec::new(),
            };
            if concepts.insert(code, concept).is_some() {
                return Err(GraphError::DuplicateCode(code));
            }
        }

        let links: Vec<(ConceptCode, ConceptCode)> = concepts
            .values()
            .filter_map(|c| c.parent.map(|p| (p, c.code)))
            .collect();
        for (parent, child) in links {
            match concepts.get_mut(&parent) {
                Some(p) => p.children.push(child),
                None => return Err(GraphError::MissingParent { child, parent }),
            }
        }
        for concept in concepts.values_mut() {
            concept.children.sort();
        }

        for &start in concepts.keys() {
            let mut visited = BTreeSet::new();
            let mut cursor = Some(start);
            while let Some(code) = cursor {
                if !visited.insert(code) {
                    return Err(GraphError::Cycle(start));
                }
                cursor = concepts[&code].parent;
            }
        }

        let roots = concepts
            .values()
            .filter(|c| c.parent.is_none())
            .map(|c| c.code)
            .collect();
        Ok(Self { concepts, roots })
    }

    pub fn lookup(&self, code: ConceptCode) -> Result<&Concept, GraphError> {
        self.concepts
            .get(&code)
            .ok_or(GraphError::UnknownCode(code))
    }

    /// Direct children in ascending code order.
    pub fn children(&self, code: ConceptCode) -> Result<Vec<&Concept>, GraphError> {
        let concept = self.lookup(code)?;
        Ok(concept.children.iter().map(|c| &self.concepts[c]).collect())
    }

    pub fn parent(&self, code: ConceptCode) -> Result<Option<&Concept>, GraphError> {
        let concept = self.lookup(code)?;
        Ok(concept.parent.map(|p| &self.concepts[&p]))
    }

    pub fn roots(&self) -> &[ConceptCode] {
        &self.roots
    }

    /// All concepts in ascending code order.
    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn count(&self, tier: Tier) -> usize {
        self.concepts.keys().filter(|c| c.tier() == tier).count()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn find_descriptor(&self, tier: Tier, descriptor: &str) -> Option<&Concept> {
        self.concepts
            .values()
            .find(|c| c.code.tier() == tier && c.descriptor == descriptor)
    }
}

/// (tier, index, descriptor, parent)
type Entry = (Tier, u32, &'static str, Option<(Tier, u32)>);

const CANONICAL: &[Entry] = {
    use Tier::*;
    &[
        (Object, 1, "human", None),
        (Object, 2, "AGI", None),
        (Object, 3, "cyberworld", None),
        (Class, 1, "individual", Some((Object, 1))),
        (Class, 2, "society", Some((Object, 1))),
        (Class, 3, "swarm", Some((Object, 2))),
        (Class, 4, "physical", Some((Object, 3))),
        (Class, 5, "social", Some((Object, 3))),
        (Class, 6, "mental", Some((Object, 3))),
        (Class, 7, "cyber", Some((Object, 3))),
        (Attribute, 1, "physical", None),
        (Attribute, 2, "abstract", None),
        (SubAttribute, 1, "composition", Some((Attribute, 1))),
        (SubAttribute, 2, "architecture", Some((Attribute, 1))),
        (SubAttribute, 3, "locality", Some((Attribute, 1))),
        (SubAttribute, 4, "security", Some((Attribute, 2))),
        (SubAttribute, 5, "intelligence", Some((Attribute, 2))),
        (SubAttribute, 6, "autonomy", Some((Attribute, 2))),
        (SubAttribute, 7, "existence", Some((Relationship, 1))),
        (SubAttribute, 8, "policy", Some((Relationship, 1))),
        (SubAttribute, 9, "attack", Some((Relationship, 2))),
        (SubAttribute, 10, "defend", Some((Relationship, 2))),
        (Feature, 1, "matter", Some((SubAttribute, 1))),
        (Feature, 2, "visibility", Some((SubAttribute, 1))),
        (Feature, 3, "hardware", Some((SubAttribute, 2))),
        (Feature, 4, "software", Some((SubAttribute, 2))),
        (Feature, 5, "temporal", Some((SubAttribute, 3))),
        (Feature, 6, "spatial", Some((SubAttribute, 3))),
        (Feature, 7, "logic", Some((SubAttribute, 4))),
        (Feature, 8, "uncertainty", Some((SubAttribute, 4))),
        (Feature, 9, "quality", Some((SubAttribute, 5))),
        (Feature, 10, "composition", Some((SubAttribute, 5))),
        (Feature, 11, "initiation", Some((SubAttribute, 9))),
        (Feature, 12, "intent", Some((SubAttribute, 9))),
        (Feature, 13, "reinitiation", Some((SubAttribute, 10))),
        (Relationship, 1, "passive", None),
        (Relationship, 2, "active", None),
    ]
};

/// The fixed containment ontology. Every call builds a structurally
/// identical graph.
pub fn canonical_ontology() -> ConceptGraph {
    let code = |tier, index| ConceptCode::new(tier, index).expect("canonical code in range");
    ConceptGraph::from_entries(CANONICAL.iter().map(|&(tier, index, descriptor, parent)| {
        (
            code(tier, index),
            descriptor,
            parent.map(|(t, i)| code(t, i)),
        )
    }))
    .expect("canonical ontology is well formed")
}
