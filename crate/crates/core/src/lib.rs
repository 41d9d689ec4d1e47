//! Containment ontology toolkit: the coded concept hierarchy, axiom checks,
//! an attack/defend simulator, the `.agc` text format and a corpus-driven
//! ontology extractor.

#[macro_use]
mod token;

pub mod axioms;
pub mod corpus;
pub mod dsl;
pub mod model;
pub mod ontology;
pub mod sim;

pub use token::UnknownToken;
