//! Literature-driven ontology construction.
//!
//! The pipeline runs in three steps: tokenize plain-text documents, select
//! the most frequent keywords as candidate concepts, and weight concept
//! pairs by how many windows (sentences or fixed token blocks) they share.
//! The result is viewed two ways: as the weighted co-occurrence graph and as
//! a frequency-directed tree in which every concept hangs under its
//! strongest more-frequent neighbour.

mod compare;
mod tokenize;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

pub use compare::{canonical_vocabulary, compare, Comparison, Ratio};
pub use tokenize::{
    tokenize, tokenize_str, CorpusDocument, TokenizerConfig, DEFAULT_MIN_TOKEN_LEN,
    DEFAULT_STOPWORDS,
};

pub const DEFAULT_TOP_N: usize = 50;
pub const DEFAULT_MIN_COUNT: u64 = 2;
pub const DEFAULT_MIN_WEIGHT: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("document {id} is not valid UTF-8 (error at byte {offset})")]
    Decode { id: String, offset: usize },
    #[error("corpus contains no documents")]
    EmptyCorpus,
    #[error("no concepts to relate")]
    NoConcepts,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateConcept {
    pub term: String,
    /// Occurrences across the whole corpus.
    pub frequency: u64,
    /// Number of documents containing the term.
    pub document_count: u64,
}

/// Unordered concept pair, stored with `term_a < term_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateRelation {
    pub term_a: String,
    pub term_b: String,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphologies {
    /// Parent of every concept term; `None` for roots.
    pub tree: BTreeMap<String, Option<String>>,
    /// The undirected weighted co-occurrence graph.
    pub graph: Vec<CandidateRelation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateOntology {
    /// Sorted by frequency descending, then term.
    pub concepts: Vec<CandidateConcept>,
    /// Sorted by weight descending, then terms.
    pub relations: Vec<CandidateRelation>,
    pub morphologies: Morphologies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Sentence,
    /// Consecutive non-overlapping blocks of this many tokens.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Serial,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractOptions {
    pub top_n: usize,
    pub min_count: u64,
    pub min_weight: u64,
    pub window: Window,
    pub parallelism: Parallelism,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            top_n: DEFAULT_TOP_N,
            min_count: DEFAULT_MIN_COUNT,
            min_weight: DEFAULT_MIN_WEIGHT,
            window: Window::Sentence,
            parallelism: Parallelism::Parallel,
        }
    }
}

/// term -> (frequency, document count)
type TermCounts = BTreeMap<String, (u64, u64)>;
/// (term_a, term_b) -> weight
type PairCounts = BTreeMap<(String, String), u64>;

fn count_terms(doc: &CorpusDocument) -> TermCounts {
    let mut counts = TermCounts::new();
    for t in &doc.tokens {
        counts.entry(t.clone()).or_insert((0, 1)).0 += 1;
    }
    counts
}

fn merge_terms(mut a: TermCounts, b: TermCounts) -> TermCounts {
    for (term, (f, d)) in b {
        let e = a.entry(term).or_insert((0, 0));
        e.0 += f;
        e.1 += d;
    }
    a
}

fn map_reduce<T, F, M>(corpus: &[CorpusDocument], par: Parallelism, map: F, merge: M) -> T
where
    T: Default + Send,
    F: Fn(&CorpusDocument) -> T + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    match par {
        Parallelism::Serial => corpus.iter().map(map).fold(T::default(), merge),
        Parallelism::Parallel => corpus.par_iter().map(map).reduce(T::default, merge),
    }
}

fn select_with(
    corpus: &[CorpusDocument],
    top_n: usize,
    min_count: u64,
    par: Parallelism,
) -> Result<Vec<CandidateConcept>, CorpusError> {
    if top_n == 0 {
        return Err(CorpusError::InvalidParameter(
            "top-n must be at least 1".into(),
        ));
    }
    if min_count == 0 {
        return Err(CorpusError::InvalidParameter(
            "min-count must be at least 1".into(),
        ));
    }
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let counts = map_reduce(corpus, par, count_terms, merge_terms);
    let mut concepts: Vec<CandidateConcept> = counts
        .into_iter()
        .filter(|(_, (f, _))| *f >= min_count)
        .map(|(term, (frequency, document_count))| CandidateConcept {
            term,
            frequency,
            document_count,
        })
        .collect();
    concepts.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then_with(|| a.term.cmp(&b.term))
    });
    concepts.truncate(top_n);
    Ok(concepts)
}

/// Terms occurring at least `min_count` times, ranked by frequency then
/// term, truncated to `top_n`.
pub fn select_concepts(
    corpus: &[CorpusDocument],
    top_n: usize,
    min_count: u64,
) -> Result<Vec<CandidateConcept>, CorpusError> {
    select_with(corpus, top_n, min_count, Parallelism::Parallel)
}

fn windows(doc: &CorpusDocument, window: Window) -> Vec<&[String]> {
    match window {
        Window::Sentence => doc
            .sentences
            .iter()
            .map(|r| &doc.tokens[r.clone()])
            .collect(),
        Window::Fixed(w) => doc.tokens.chunks(w).collect(),
    }
}

fn count_pairs(doc: &CorpusDocument, concepts: &BTreeSet<&str>, window: Window) -> PairCounts {
    let mut counts = PairCounts::new();
    for win in windows(doc, window) {
        let present: BTreeSet<&str> = win
            .iter()
            .map(String::as_str)
            .filter(|t| concepts.contains(t))
            .collect();
        let present: Vec<&str> = present.into_iter().collect();
        for (i, a) in present.iter().enumerate() {
            for b in &present[i + 1..] {
                *counts.entry((a.to_string(), b.to_string())).or_insert(0) += 1;
            }
        }
    }
    counts
}

fn merge_pairs(mut a: PairCounts, b: PairCounts) -> PairCounts {
    for (k, w) in b {
        *a.entry(k).or_insert(0) += w;
    }
    a
}

fn relations_with(
    corpus: &[CorpusDocument],
    concepts: &[CandidateConcept],
    window: Window,
    min_weight: u64,
    par: Parallelism,
) -> Result<Vec<CandidateRelation>, CorpusError> {
    if concepts.is_empty() {
        return Err(CorpusError::NoConcepts);
    }
    if window == Window::Fixed(0) {
        return Err(CorpusError::InvalidParameter(
            "window size must be at least 1".into(),
        ));
    }
    if min_weight == 0 {
        return Err(CorpusError::InvalidParameter(
            "min-weight must be at least 1".into(),
        ));
    }
    let terms: BTreeSet<&str> = concepts.iter().map(|c| c.term.as_str()).collect();
    let counts = map_reduce(corpus, par, |d| count_pairs(d, &terms, window), merge_pairs);
    let mut relations: Vec<CandidateRelation> = counts
        .into_iter()
        .filter(|(_, w)| *w >= min_weight)
        .map(|((term_a, term_b), weight)| CandidateRelation {
            term_a,
            term_b,
            weight,
        })
        .collect();
    relations.sort_by(|x, y| {
        y.weight
            .cmp(&x.weight)
            .then_with(|| x.term_a.cmp(&y.term_a))
            .then_with(|| x.term_b.cmp(&y.term_b))
    });
    Ok(relations)
}

/// Co-occurrence weights for every concept pair sharing a window, counted
/// once per window, keeping pairs with weight at least `min_weight`.
pub fn extract_relations(
    corpus: &[CorpusDocument],
    concepts: &[CandidateConcept],
    window: Window,
    min_weight: u64,
) -> Result<Vec<CandidateRelation>, CorpusError> {
    relations_with(corpus, concepts, window, min_weight, Parallelism::Parallel)
}

/// Builds the tree and graph views. A concept's parent is the strictly
/// more frequent neighbour with the heaviest edge to it (ties: higher
/// frequency, then the lexicographically smaller term). Relations naming
/// unknown terms are ignored for the tree.
pub fn build_morphologies(
    concepts: &[CandidateConcept],
    relations: &[CandidateRelation],
) -> Morphologies {
    let freq: BTreeMap<&str, u64> = concepts
        .iter()
        .map(|c| (c.term.as_str(), c.frequency))
        .collect();
    let mut neighbours: BTreeMap<&str, Vec<(&str, u64)>> = BTreeMap::new();
    for r in relations {
        if freq.contains_key(r.term_a.as_str()) && freq.contains_key(r.term_b.as_str()) {
            neighbours
                .entry(&r.term_a)
                .or_default()
                .push((&r.term_b, r.weight));
            neighbours
                .entry(&r.term_b)
                .or_default()
                .push((&r.term_a, r.weight));
        }
    }

    let tree = concepts
        .iter()
        .map(|c| {
            let own = c.frequency;
            let parent = neighbours
                .get(c.term.as_str())
                .into_iter()
                .flatten()
                .filter(|(n, w)| *w > 0 && freq[n] > own)
                .max_by(|(na, wa), (nb, wb)| {
                    wa.cmp(wb).then(freq[na].cmp(&freq[nb])).then(nb.cmp(na))
                })
                .map(|(n, _)| n.to_string());
            (c.term.clone(), parent)
        })
        .collect();

    Morphologies {
        tree,
        graph: relations.to_vec(),
    }
}

/// Runs selection, relation extraction and morphology building.
pub fn extract(
    corpus: &[CorpusDocument],
    opts: &ExtractOptions,
) -> Result<CandidateOntology, CorpusError> {
    let concepts = select_with(corpus, opts.top_n, opts.min_count, opts.parallelism)?;
    let relations = if concepts.is_empty() {
        Vec::new()
    } else {
        relations_with(
            corpus,
            &concepts,
            opts.window,
            opts.min_weight,
            opts.parallelism,
        )?
    };
    let morphologies = build_morphologies(&concepts, &relations);
    Ok(CandidateOntology {
        concepts,
        relations,
        morphologies,
    })
}

/// Reads every `.txt` file directly inside `dir`, in file-name order. The
/// document id is the file stem.
pub fn load_dir(dir: &Path, config: &TokenizerConfig) -> Result<Vec<CorpusDocument>, CorpusError> {
    let io = |path: &Path, e: std::io::Error| CorpusError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| io(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| io(dir, e)))
        .collect::<Result<Vec<_>, _>>()?;
    paths.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"));
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let bytes = fs::read(p).map_err(|e| io(p, e))?;
            let id = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            tokenize(&id, &bytes, config)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str) -> CorpusDocument {
        tokenize_str(id, text, &TokenizerConfig::default())
    }

    fn concept(term: &str, frequency: u64) -> CandidateConcept {
        CandidateConcept {
            term: term.into(),
            frequency,
            document_count: 1,
        }
    }

    fn rel(a: &str, b: &str, weight: u64) -> CandidateRelation {
        CandidateRelation {
            term_a: a.into(),
            term_b: b.into(),
            weight,
        }
    }

    fn terms(c: &[CandidateConcept]) -> Vec<(&str, u64)> {
        c.iter().map(|c| (c.term.as_str(), c.frequency)).collect()
    }

    #[test]
    fn select_ranks_by_frequency() {
        let corpus = [
            doc("a", "containment agent containment. containment agent."),
            doc("b", "containment agent containment zebra."),
        ];
        let got = select_concepts(&corpus, 2, 1).unwrap();
        assert_eq!(terms(&got), [("containment", 5), ("agent", 3)]);
        assert_eq!(got[0].document_count, 2);
    }

    #[test]
    fn ties_break_lexicographically() {
        let corpus = [doc(
            "a",
            "swarm policy swarm policy swarm policy swarm policy",
        )];
        assert_eq!(
            terms(&select_concepts(&corpus, 2, 1).unwrap()),
            [("policy", 4), ("swarm", 4)]
        );
    }

    #[test]
    fn degenerate_parameters() {
        let corpus = [doc("a", "agent")];
        assert!(matches!(
            select_concepts(&corpus, 0, 1),
            Err(CorpusError::InvalidParameter(_))
        ));
        assert_eq!(select_concepts(&[], 5, 1), Err(CorpusError::EmptyCorpus));
        assert_eq!(
            extract_relations(&corpus, &[], Window::Sentence, 1),
            Err(CorpusError::NoConcepts)
        );
    }

    #[test]
    fn sentence_pairs_weight_one() {
        let corpus = [doc("a", "agi containment requires policy")];
        let concepts = [
            concept("agi", 1),
            concept("containment", 1),
            concept("policy", 1),
        ];
        let got = extract_relations(&corpus, &concepts, Window::Sentence, 1).unwrap();
        assert_eq!(
            got,
            [
                rel("agi", "containment", 1),
                rel("agi", "policy", 1),
                rel("containment", "policy", 1)
            ]
        );
    }

    #[test]
    fn never_cooccurring_yields_nothing() {
        let corpus = [doc("a", "agent here. swarm there.")];
        let concepts = [concept("agent", 1), concept("swarm", 1)];
        assert!(extract_relations(&corpus, &concepts, Window::Sentence, 1)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn repeated_pair_counts_once_per_window() {
        let corpus = [doc("a", "agent swarm agent. swarm agent. agent swarm.")];
        let concepts = [concept("agent", 4), concept("swarm", 3)];
        assert_eq!(
            extract_relations(&corpus, &concepts, Window::Sentence, 2).unwrap(),
            [rel("agent", "swarm", 3)]
        );
        assert!(extract_relations(&corpus, &concepts, Window::Sentence, 4)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn fixed_windows_are_blocks() {
        // tokens: agent swarm world agent | swarm world
        let corpus = [doc("a", "agent swarm world agent swarm world")];
        let concepts = [concept("agent", 2), concept("swarm", 2)];
        assert_eq!(
            extract_relations(&corpus, &concepts, Window::Fixed(4), 1).unwrap(),
            [rel("agent", "swarm", 1)]
        );
        assert_eq!(
            extract_relations(&corpus, &concepts, Window::Fixed(2), 1).unwrap(),
            [rel("agent", "swarm", 1)]
        );
        assert!(matches!(
            extract_relations(&corpus, &concepts, Window::Fixed(0), 1),
            Err(CorpusError::InvalidParameter(_))
        ));
    }

    #[test]
    fn singleton_tree() {
        let m = build_morphologies(&[concept("agi", 3)], &[]);
        assert_eq!(m.tree, BTreeMap::from([("agi".to_string(), None)]));
        assert!(m.graph.is_empty());
    }

    #[test]
    fn chain_tree() {
        let concepts = [concept("five", 5), concept("three", 3), concept("two", 2)];
        let relations = [rel("five", "three", 1), rel("three", "two", 1)];
        let m = build_morphologies(&concepts, &relations);
        assert_eq!(m.tree["five"], None);
        assert_eq!(m.tree["three"].as_deref(), Some("five"));
        assert_eq!(m.tree["two"].as_deref(), Some("three"));
        assert_eq!(m.graph, relations);
    }

    #[test]
    fn equal_frequency_neighbours_are_roots() {
        let m = build_morphologies(&[concept("a1", 4), concept("b1", 4)], &[rel("a1", "b1", 3)]);
        assert!(m.tree.values().all(Option::is_none));
    }

    #[test]
    fn parent_ties_prefer_frequency_then_term() {
        let concepts = [
            concept("big", 9),
            concept("mid", 5),
            concept("alt", 5),
            concept("leaf", 1),
        ];
        let tied_weight = [rel("big", "leaf", 2), rel("leaf", "mid", 2)];
        assert_eq!(
            build_morphologies(&concepts, &tied_weight).tree["leaf"].as_deref(),
            Some("big")
        );
        let tied_freq = [rel("alt", "leaf", 2), rel("leaf", "mid", 2)];
        assert_eq!(
            build_morphologies(&concepts, &tied_freq).tree["leaf"].as_deref(),
            Some("alt")
        );
        let heavier = [rel("big", "leaf", 1), rel("leaf", "mid", 2)];
        assert_eq!(
            build_morphologies(&concepts, &heavier).tree["leaf"].as_deref(),
            Some("mid")
        );
    }

    #[test]
    fn serial_and_parallel_agree() {
        let corpus: Vec<_> = (0..12)
            .map(|i| {
                doc(
                    &format!("d{i}"),
                    &"agent swarm policy world. containment agent. ".repeat(i + 1),
                )
            })
            .collect();
        let mut opts = ExtractOptions {
            min_count: 1,
            ..Default::default()
        };
        opts.parallelism = Parallelism::Serial;
        let serial = extract(&corpus, &opts).unwrap();
        opts.parallelism = Parallelism::Parallel;
        assert_eq!(serial, extract(&corpus, &opts).unwrap());
    }

    fn arb_corpus() -> impl proptest::strategy::Strategy<Value = Vec<CorpusDocument>> {
        use proptest::prelude::*;
        let word = prop::sample::select(vec![
            "agent", "swarm", "policy", "world", "attack", "defend", "human", ".",
        ]);
        prop::collection::vec(prop::collection::vec(word, 0..30), 1..5).prop_map(|docs| {
            docs.iter()
                .enumerate()
                .map(|(i, w)| doc(&format!("d{i}"), &w.join(" ")))
                .collect()
        })
    }

    proptest::proptest! {
        #[test]
        fn tree_is_acyclic(corpus in arb_corpus()) {
            let opts = ExtractOptions { min_count: 1, ..Default::default() };
            let c = extract(&corpus, &opts).unwrap();
            let freq: BTreeMap<&str, u64> = c.concepts.iter().map(|x| (x.term.as_str(), x.frequency)).collect();
            for (child, parent) in &c.morphologies.tree {
                let mut seen = BTreeSet::new();
                let mut at = Some(child.as_str());
                while let Some(t) = at {
                    proptest::prop_assert!(seen.insert(t), "cycle through {}", t);
                    at = c.morphologies.tree[t].as_deref();
                }
                if let Some(p) = parent {
                    proptest::prop_assert!(freq[p.as_str()] > freq[child.as_str()]);
                }
            }
        }

        #[test]
        fn thresholds_only_remove(corpus in arb_corpus(), lo in 1u64..4, extra in 0u64..4) {
            let hi = lo + extra;
            let names = |v: &[CandidateConcept]| v.iter().map(|c| c.term.clone()).collect::<BTreeSet<_>>();
            let many = select_concepts(&corpus, 50, lo).unwrap();
            let few = select_concepts(&corpus, 50, hi).unwrap();
            proptest::prop_assert!(names(&few).is_subset(&names(&many)));
            if !many.is_empty() {
                let pairs = |v: Vec<CandidateRelation>| v.into_iter().map(|r| (r.term_a, r.term_b, r.weight)).collect::<BTreeSet<_>>();
                let loose = pairs(extract_relations(&corpus, &many, Window::Sentence, lo).unwrap());
                let strict = pairs(extract_relations(&corpus, &many, Window::Sentence, hi).unwrap());
                proptest::prop_assert!(strict.is_subset(&loose));
            }
        }
    }
}
