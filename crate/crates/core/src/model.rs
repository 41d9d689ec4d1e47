//! Instantiated entities: agents, policies and the cyber world holding them.
//!
//! These are plain data. Values that break the ontology's rules (a swarm of
//! humans, a security spectrum outside `[0, 1]`, graded autonomy) are
//! representable; [`crate::axioms`] reports them.

use std::collections::{BTreeMap, BTreeSet};

token_enum!(
    /// Agent sort. Valid agents never use `CyberWorld`; the validator flags
    /// it.
    AgentKind, "agent kind" {
        Human => "human",
        Agi => "agi",
        CyberWorld => "cyberworld",
    }
);

token_enum!(Grouping, "grouping" {
    Individual => "individual",
    Society => "society",
    Swarm => "swarm",
});

token_enum!(Matter, "matter" {
    Organic => "organic",
    Inorganic => "inorganic",
});

token_enum!(Visibility, "visibility" {
    Visible => "visible",
    Invisible => "invisible",
});

token_enum!(Quality, "intelligence quality" {
    Narrow => "narrow",
    General => "general",
});

token_enum!(Composition, "intelligence composition" {
    Organic => "organic",
    Artificial => "artificial",
});

token_enum!(
    /// Motive behind an active event: forestalling a perceived element of
    /// the knowledge state, or reacting to an actual one.
    Intent, "intent" {
        Preemptive => "preemptive",
        Responsive => "responsive",
    }
);

token_enum!(
    /// The four CPSM spaces, in canonical order.
    Space, "space" {
        Cyber => "cyber",
        Physical => "physical",
        Social => "social",
        Mental => "mental",
    }
);

/// Temporal and spatial reference point of an agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Locality {
    /// Abstract tick; only ordering matters.
    pub time: u64,
    /// World identifier.
    pub space: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalAttributes {
    pub matter: Option<Matter>,
    pub visibility: Visibility,
    pub hardware: Vec<String>,
    pub software: Vec<String>,
    pub locality: Option<Locality>,
}

/// Position on the logic and uncertainty spectra. Valid values lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Security {
    pub logic: f64,
    pub uncertainty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Intelligence {
    pub quality: Quality,
    pub composition: Composition,
}

/// Autonomy as written in the input. Only the two binary values are
/// well formed; `Graded` is carried through so it can be flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Autonomy {
    Autonomous,
    NotAutonomous,
    Graded(f64),
}

impl Autonomy {
    pub fn is_binary(self) -> bool {
        !matches!(self, Autonomy::Graded(_))
    }
}

impl From<bool> for Autonomy {
    fn from(b: bool) -> Self {
        if b {
            Autonomy::Autonomous
        } else {
            Autonomy::NotAutonomous
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbstractAttributes {
    pub security: Security,
    pub intelligence: Option<Intelligence>,
    pub autonomy: Autonomy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: String,
    pub kind: AgentKind,
    pub grouping: Grouping,
    pub physical: PhysicalAttributes,
    pub abstract_attrs: AbstractAttributes,
}

impl Agent {
    /// A fully consistent agent of the given kind, located in `world` at tick 0.
    pub fn new(id: impl Into<String>, kind: AgentKind, grouping: Grouping, world: &str) -> Self {
        let organic = kind == AgentKind::Human;
        Agent {
            id: id.into(),
            kind,
            grouping,
            physical: PhysicalAttributes {
                matter: Some(if organic {
                    Matter::Organic
                } else {
                    Matter::Inorganic
                }),
                visibility: Visibility::Visible,
                hardware: Vec::new(),
                software: Vec::new(),
                locality: Some(Locality {
                    time: 0,
                    space: world.to_string(),
                }),
            },
            abstract_attrs: AbstractAttributes {
                security: Security {
                    logic: 0.5,
                    uncertainty: 0.5,
                },
                intelligence: Some(Intelligence {
                    quality: Quality::General,
                    composition: if organic {
                        Composition::Organic
                    } else {
                        Composition::Artificial
                    },
                }),
                autonomy: Autonomy::Autonomous,
            },
        }
    }
}

/// A declarative requirement attached to a world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub id: String,
    pub world: String,
    pub predicate: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyberWorld {
    pub id: String,
    pub spaces: BTreeSet<Space>,
    pub agents: BTreeMap<String, Agent>,
    pub policies: BTreeMap<String, Policy>,
    /// Knowledge-state counter; starts at 0 and never decreases.
    pub k: u64,
}

impl CyberWorld {
    pub fn new(id: impl Into<String>, spaces: impl IntoIterator<Item = Space>) -> Self {
        CyberWorld {
            id: id.into(),
            spaces: spaces.into_iter().collect(),
            agents: BTreeMap::new(),
            policies: BTreeMap::new(),
            k: 0,
        }
    }

    pub fn with_agent(mut self, agent: Agent) -> Self {
        self.agents.insert(agent.id.clone(), agent);
        self
    }

    pub fn with_policy(mut self, policy: Policy) -> Self {
        self.policies.insert(policy.id.clone(), policy);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_roundtrip() {
        for s in Space::ALL {
            assert_eq!(s.as_str().parse::<Space>().unwrap(), *s);
        }
        for k in AgentKind::ALL {
            assert_eq!(k.to_string().parse::<AgentKind>().unwrap(), *k);
        }
        assert!("Cyber".parse::<Space>().is_err());
    }

    #[test]
    fn space_order_puts_cyber_first() {
        let set: BTreeSet<_> = [Space::Mental, Space::Cyber, Space::Social]
            .into_iter()
            .collect();
        assert_eq!(set.into_iter().next(), Some(Space::Cyber));
    }

    #[test]
    fn default_agents_match_their_kind() {
        let h = Agent::new("H1", AgentKind::Human, Grouping::Individual, "W1");
        assert_eq!(h.physical.matter, Some(Matter::Organic));
        let g = Agent::new("G1", AgentKind::Agi, Grouping::Swarm, "W1");
        assert_eq!(
            g.abstract_attrs.intelligence.unwrap().composition,
            Composition::Artificial
        );
    }
}
