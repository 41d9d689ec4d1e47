use std::collections::BTreeSet;
use std::fmt;

use super::CandidateOntology;
use crate::ontology::ConceptGraph;

/// Exact non-negative fraction, kept in lowest terms. A zero denominator
/// never occurs: undefined ratios are reported as `0/1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: u64,
    den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        if den == 0 || num == 0 {
            return Ratio { num: 0, den: 1 };
        }
        let g = gcd(num, den);
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub matched: Vec<String>,
    /// Canonical terms absent from the candidate.
    pub missing: Vec<String>,
    /// Candidate terms absent from the canonical vocabulary.
    pub spurious: Vec<String>,
    pub precision: Ratio,
    pub recall: Ratio,
    pub f1: Ratio,
}

/// Lowercased descriptors of every concept in the graph.
pub fn canonical_vocabulary(graph: &ConceptGraph) -> BTreeSet<String> {
    graph
        .concepts()
        .map(|c| c.descriptor.to_lowercase())
        .collect()
}

pub fn compare(candidate: &CandidateOntology, canonical: &ConceptGraph) -> Comparison {
    let vocab = canonical_vocabulary(canonical);
    let terms: BTreeSet<String> = candidate.concepts.iter().map(|c| c.term.clone()).collect();
    let matched: Vec<String> = terms.intersection(&vocab).cloned().collect();
    let missing = vocab.difference(&terms).cloned().collect();
    let spurious = terms.difference(&vocab).cloned().collect();
    let m = matched.len() as u64;
    Comparison {
        precision: Ratio::new(m, terms.len() as u64),
        recall: Ratio::new(m, vocab.len() as u64),
        // Harmonic mean of m/|C| and m/|V| simplifies to 2m/(|C|+|V|).
        f1: Ratio::new(2 * m, (terms.len() + vocab.len()) as u64),
        matched,
        missing,
        spurious,
    }
}
