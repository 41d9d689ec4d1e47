//! Brute-force recount of the extraction pipeline, written without reference
//! to the library's data structures.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use agc_core::corpus::DEFAULT_STOPWORDS;

pub enum OracleWindow {
    Sentence,
    Fixed(usize),
}

/// Each document as a list of non-empty sentences of kept tokens.
pub fn read_corpus(dir: &Path) -> Vec<Vec<Vec<String>>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| sentences(&std::fs::read_to_string(p).unwrap()))
        .collect()
}

pub fn sentences(text: &str) -> Vec<Vec<String>> {
    let mapped: String = text
        .chars()
        .map(|c| match c {
            '.' | '!' | '?' => '\n',
            c if c.is_alphanumeric() => c,
            _ => ' ',
        })
        .collect();
    mapped
        .to_lowercase()
        .lines()
        .map(|l| {
            l.split_whitespace()
                .filter(|w| w.chars().count() >= 3 && !DEFAULT_STOPWORDS.contains(w))
                .map(String::from)
                .collect::<Vec<_>>()
        })
        .filter(|s| !s.is_empty())
        .collect()
}

pub struct Oracle {
    /// Ranked concepts with (frequency, document count).
    pub concepts: Vec<(String, u64, u64)>,
    pub weights: BTreeMap<(String, String), u64>,
    pub parents: BTreeMap<String, Option<String>>,
}

pub fn run_oracle(
    corpus: &[Vec<Vec<String>>],
    top_n: usize,
    min_count: u64,
    min_weight: u64,
    window: &OracleWindow,
) -> Oracle {
    let mut freq: BTreeMap<String, u64> = BTreeMap::new();
    let mut docs: BTreeMap<String, u64> = BTreeMap::new();
    for doc in corpus {
        let mut seen = BTreeSet::new();
        for t in doc.iter().flatten() {
            *freq.entry(t.clone()).or_default() += 1;
            seen.insert(t.clone());
        }
        for t in seen {
            *docs.entry(t).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, u64, u64)> = freq
        .iter()
        .filter(|(_, f)| **f >= min_count)
        .map(|(t, f)| (t.clone(), *f, docs[t]))
        .collect();
    ranked.sort_by(|a, b| (std::cmp::Reverse(a.1), &a.0).cmp(&(std::cmp::Reverse(b.1), &b.0)));
    ranked.truncate(top_n);

    let mut windows: Vec<Vec<String>> = Vec::new();
    for doc in corpus {
        match window {
            OracleWindow::Sentence => windows.extend(doc.iter().cloned()),
            OracleWindow::Fixed(w) => {
                let flat: Vec<String> = doc.iter().flatten().cloned().collect();
                let mut start = 0;
                while start < flat.len() {
                    let end = (start + w).min(flat.len());
                    windows.push(flat[start..end].to_vec());
                    start = end;
                }
            }
        }
    }
    let names: Vec<&String> = ranked.iter().map(|c| &c.0).collect();
    let mut weights = BTreeMap::new();
    for a in &names {
        for b in &names {
            if a >= b {
                continue;
            }
            let w = windows
                .iter()
                .filter(|win| win.contains(a) && win.contains(b))
                .count() as u64;
            if w >= min_weight && w > 0 {
                weights.insert(((*a).clone(), (*b).clone()), w);
            }
        }
    }

    let weight = |x: &String, y: &String| {
        let key = if x < y {
            (x.clone(), y.clone())
        } else {
            (y.clone(), x.clone())
        };
        weights.get(&key).copied().unwrap_or(0)
    };
    let mut parents = BTreeMap::new();
    for (c, fc, _) in &ranked {
        let mut best: Option<(u64, u64, &String)> = None;
        for (p, fp, _) in &ranked {
            let w = weight(c, p);
            if *fp <= *fc || w == 0 {
                continue;
            }
            best = match best {
                None => Some((w, *fp, p)),
                Some((bw, bf, bp)) => {
                    if (w, *fp) > (bw, bf) || ((w, *fp) == (bw, bf) && p < bp) {
                        Some((w, *fp, p))
                    } else {
                        Some((bw, bf, bp))
                    }
                }
            };
        }
        parents.insert(c.clone(), best.map(|b| b.2.clone()));
    }
    Oracle {
        concepts: ranked,
        weights,
        parents,
    }
}

/// Lowercased descriptors listed in a concepts document.
pub fn vocabulary(concepts_text: &str) -> BTreeSet<String> {
    concepts_text
        .lines()
        .filter_map(|l| l.split(" descriptor=").nth(1))
        .map(|rest| rest.split(' ').next().unwrap().to_lowercase())
        .collect()
}
