//! Ontology concept tree and ancestor vectors.
//!
//! Concepts form a tree under an is-parent-of relation. Every vocabulary
//! word is string-matched against normalized concept labels; a matched word
//! receives the binary vector enumerating all proper ancestors of its
//! concept, an unmatched word the zero vector. Only single-token labels are
//! matchable; skipped multi-word labels are counted.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{Lemmatizer, Vocabulary};
use crate::error::{Error, Result};
use crate::math;

/// One row of an ontology edge list. `parent_id = None` marks a root and
/// supplies its label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyEdge {
    pub child_id: String,
    pub parent_id: Option<String>,
    pub child_label: String,
}

/// Parent/child concept tree with labels.
#[derive(Debug, Clone)]
pub struct OntologyTree {
    labels: BTreeMap<String, String>,
    parent: BTreeMap<String, String>,
    /// All concept ids (children and referenced parents), sorted.
    ids: Vec<String>,
}

impl OntologyTree {
    /// Builds and validates the tree: every concept has at most one parent
    /// and ancestor chains are acyclic.
    pub fn new(edges: impl IntoIterator<Item = OntologyEdge>) -> Result<OntologyTree> {
        let mut labels = BTreeMap::new();
        let mut parent = BTreeMap::new();
        let mut ids = BTreeSet::new();
        for edge in edges {
            ids.insert(edge.child_id.clone());
            if let Some(old) = labels.insert(edge.child_id.clone(), edge.child_label.clone()) {
                if old != edge.child_label {
                    return Err(Error::InvalidOntology(alloc::format!(
                        "concept {} has two labels",
                        edge.child_id
                    )));
                }
            }
            if let Some(pid) = edge.parent_id {
                ids.insert(pid.clone());
                if let Some(old) = parent.insert(edge.child_id.clone(), pid.clone()) {
                    if old != pid {
                        return Err(Error::InvalidOntology(alloc::format!(
                            "concept {} has two parents",
                            edge.child_id
                        )));
                    }
                }
            }
        }
        let tree = OntologyTree {
            labels,
            parent,
            ids: ids.into_iter().collect(),
        };
        for id in &tree.ids {
            tree.check_acyclic(id)?;
        }
        Ok(tree)
    }

    fn check_acyclic(&self, start: &str) -> Result<()> {
        let mut seen = BTreeSet::new();
        let mut cursor = start;
        while let Some(next) = self.parent.get(cursor) {
            if !seen.insert(cursor.to_string()) {
                return Err(Error::InvalidOntology(alloc::format!(
                    "cycle through concept {start}"
                )));
            }
            cursor = next;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Sorted concept ids; positions double as dense concept indices.
    pub fn concept_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn label(&self, id: &str) -> Option<&str> {
        self.labels.get(id).map(String::as_str)
    }

    pub fn parent_of(&self, id: &str) -> Option<&str> {
        self.parent.get(id).map(String::as_str)
    }

    /// Proper ancestors of a concept, nearest first.
    pub fn ancestors(&self, id: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut cursor = id;
        while let Some(next) = self.parent.get(cursor) {
            out.push(next.as_str());
            cursor = next;
        }
        out
    }

    fn dense_index(&self, id: &str) -> u32 {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).expect("known id") as u32
    }
}

/// Binary ancestor vectors for a whole vocabulary, stored sparse: the sorted
/// dense concept indices with value 1. An empty set is the zero vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AncestorVectorSet {
    vectors: Vec<Vec<u32>>,
    /// Concepts whose labels span several tokens and were not matchable.
    pub skipped_multiword: usize,
    /// Vocabulary words that matched some concept.
    pub matched_words: usize,
}

impl AncestorVectorSet {
    /// The zero vector for every word (used when no ontology is supplied).
    pub fn zeros(vocab_size: usize) -> AncestorVectorSet {
        AncestorVectorSet {
            vectors: alloc::vec![Vec::new(); vocab_size],
            skipped_multiword: 0,
            matched_words: 0,
        }
    }

    /// Builds directly from per-word sorted ancestor index lists.
    pub fn from_vectors(vectors: Vec<Vec<u32>>) -> AncestorVectorSet {
        let matched_words = vectors.iter().filter(|v| !v.is_empty()).count();
        AncestorVectorSet {
            vectors,
            skipped_multiword: 0,
            matched_words,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Sorted ancestor concept indices of word `i` (empty = unmatched).
    pub fn vector(&self, word: u32) -> &[u32] {
        &self.vectors[word as usize]
    }

    /// Cosine similarity of two binary ancestor vectors; zero vectors give 0.
    pub fn cosine(&self, i: u32, j: u32) -> f64 {
        let (a, b) = (self.vector(i), self.vector(j));
        if a.is_empty() || b.is_empty() {
            return 0.0;
        }
        let mut shared = 0usize;
        let (mut pa, mut pb) = (0, 0);
        while pa < a.len() && pb < b.len() {
            match a[pa].cmp(&b[pb]) {
                core::cmp::Ordering::Less => pa += 1,
                core::cmp::Ordering::Greater => pb += 1,
                core::cmp::Ordering::Equal => {
                    shared += 1;
                    pa += 1;
                    pb += 1;
                }
            }
        }
        shared as f64 / math::sqrt((a.len() * b.len()) as f64)
    }
}

/// Matches every vocabulary word against normalized concept labels and
/// collects ancestor vectors. Single-token labels only; ambiguous labels
/// resolve to the concept with the smallest id.
pub fn build_ancestor_vectors(tree: &OntologyTree, vocabulary: &Vocabulary) -> AncestorVectorSet {
    let lemmatizer = Lemmatizer::new();
    let mut by_label: BTreeMap<String, &str> = BTreeMap::new();
    let mut skipped_multiword = 0usize;
    for id in tree.concept_ids() {
        let Some(label) = tree.label(id) else {
            continue;
        };
        let tokens: Vec<&str> = label.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            [single] => {
                // Smallest id wins on duplicate labels; ids iterate sorted.
                by_label
                    .entry(lemmatizer.normalize(single))
                    .or_insert(id.as_str());
            }
            _ => skipped_multiword += 1,
        }
    }

    let mut vectors = Vec::with_capacity(vocabulary.len());
    let mut matched_words = 0usize;
    for word in vocabulary.words() {
        match by_label.get(word.as_str()) {
            Some(&concept) => {
                matched_words += 1;
                let mut v: Vec<u32> = tree
                    .ancestors(concept)
                    .into_iter()
                    .map(|a| tree.dense_index(a))
                    .collect();
                v.sort_unstable();
                vectors.push(v);
            }
            None => vectors.push(Vec::new()),
        }
    }
    AncestorVectorSet {
        vectors,
        skipped_multiword,
        matched_words,
    }
}
