//! Sentence-bounded word-word co-occurrence counts.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::corpus::{Sentence, Vocabulary};

/// Sparse symmetric co-occurrence table with 1/distance weighting.
///
/// An unordered pair at distance `dist` contributes `1/dist` to both
/// `X[i][j]` and `X[j][i]`; a same-word pair contributes once to the
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceTable {
    window: usize,
    vocab_size: usize,
    vocab_fingerprint: u64,
    counts: BTreeMap<(u32, u32), f64>,
}

impl CooccurrenceTable {
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn vocab_fingerprint(&self) -> u64 {
        self.vocab_fingerprint
    }

    pub fn is_symmetric(&self) -> bool {
        true
    }

    /// Number of stored nonzero cells (both orders of a pair count).
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, i: u32, j: u32) -> f64 {
        self.counts.get(&(i, j)).copied().unwrap_or(0.0)
    }

    /// Nonzero cells in deterministic `(i, j)` order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.counts.iter().map(|(&(i, j), &x)| (i, j, x))
    }
}

/// Counts co-occurrences over encoded sentences, window-bounded and
/// sentence-bounded. Out-of-vocabulary words participate as the unknown
/// symbol.
pub fn build_cooccurrence(
    sentences: &[Sentence],
    vocabulary: &Vocabulary,
    window: usize,
) -> CooccurrenceTable {
    let window = window.max(1);
    let mut counts: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for sentence in sentences {
        let ids: Vec<u32> = vocabulary.encode_sentence(sentence);
        for t in 0..ids.len() {
            for dist in 1..=window {
                let Some(&other) = ids.get(t + dist) else {
                    break;
                };
                let weight = 1.0 / dist as f64;
                let (i, j) = (ids[t], other);
                *counts.entry((i, j)).or_insert(0.0) += weight;
                if i != j {
                    *counts.entry((j, i)).or_insert(0.0) += weight;
                }
            }
        }
    }
    CooccurrenceTable {
        window,
        vocab_size: vocabulary.len(),
        vocab_fingerprint: vocabulary.fingerprint(),
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocabulary, tokenize_and_split};

    fn table_of(text: &str, window: usize) -> (CooccurrenceTable, Vocabulary) {
        let sentences = tokenize_and_split(text);
        let vocab = build_vocabulary(&sentences, 1);
        (build_cooccurrence(&sentences, &vocab, window), vocab)
    }

    #[test]
    fn adjacent_pair_counts_one() {
        let (table, vocab) = table_of("a b", 2);
        let (a, b) = (vocab.word_id("a").unwrap(), vocab.word_id("b").unwrap());
        assert_eq!(table.get(a, b), 1.0);
        assert_eq!(table.get(b, a), 1.0);
        assert_eq!(table.get(a, a), 0.0);
    }

    #[test]
    fn single_word_corpus_is_empty() {
        let (table, _) = table_of("alone", 5);
        assert!(table.is_empty());
    }

    #[test]
    fn distance_weighting_and_diagonal() {
        let (table, vocab) = table_of("a b a", 2);
        let (a, b) = (vocab.word_id("a").unwrap(), vocab.word_id("b").unwrap());
        assert_eq!(table.get(a, b), 2.0);
        assert_eq!(table.get(b, a), 2.0);
        assert_eq!(table.get(a, a), 0.5);
    }

    #[test]
    fn symmetric_and_deterministic() {
        let (t1, _) = table_of("no acute disease. no pleural effusion.", 10);
        let (t2, _) = table_of("no acute disease. no pleural effusion.", 10);
        assert_eq!(t1, t2);
        for (i, j, x) in t1.entries() {
            assert_eq!(t1.get(j, i), x);
        }
    }

    #[test]
    fn window_is_sentence_bounded() {
        // "b" and "c" are in different sentences: no pair across them.
        let (table, vocab) = table_of("A b. C d.", 10);
        let b = vocab.word_id("b").unwrap();
        let c = vocab.word_id("c").unwrap();
        assert_eq!(table.get(b, c), 0.0);
    }
}
