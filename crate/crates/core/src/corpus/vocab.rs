//! Vocabulary built from normalized corpus tokens.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::Sentence;

/// Reserved symbol for out-of-vocabulary words; always index 0.
pub const UNKNOWN_SYMBOL: &str = "<unk>";

/// Word <-> index bijection. Index 0 is the unknown symbol; the remaining
/// words are ordered by descending corpus frequency then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: BTreeMap<String, u32>,
    min_count: u32,
}

impl Vocabulary {
    /// Builds a vocabulary from an explicit word list, unknown symbol first.
    /// Duplicates keep their first position.
    pub fn from_words<I, S>(words: I, min_count: u32) -> Vocabulary
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut vocab = Vocabulary {
            words: Vec::new(),
            index: BTreeMap::new(),
            min_count,
        };
        vocab.push(UNKNOWN_SYMBOL);
        for w in words {
            let w = w.as_ref();
            if w != UNKNOWN_SYMBOL {
                vocab.push(w);
            }
        }
        vocab
    }

    fn push(&mut self, word: &str) {
        if !self.index.contains_key(word) {
            self.index.insert(word.to_string(), self.words.len() as u32);
            self.words.push(word.to_string());
        }
    }

    /// Number of entries including the unknown symbol.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the unknown symbol is always present
    }

    pub fn unk_id(&self) -> u32 {
        0
    }

    pub fn min_count(&self) -> u32 {
        self.min_count
    }

    /// Index of an in-vocabulary word.
    pub fn word_id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    /// Index of a normalized word, falling back to the unknown symbol.
    pub fn encode_word(&self, normalized: &str) -> u32 {
        self.word_id(normalized).unwrap_or(0)
    }

    pub fn word(&self, id: u32) -> Option<&str> {
        self.words.get(id as usize).map(String::as_str)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Encodes a sentence as word indices; out-of-vocabulary normalized forms
    /// map to the unknown symbol. Output length equals the token count.
    pub fn encode_sentence(&self, sentence: &Sentence) -> Vec<u32> {
        sentence
            .tokens
            .iter()
            .map(|t| self.encode_word(&t.normalized))
            .collect()
    }

    /// FNV-1a hash over the ordered word list, used to pair embedding
    /// matrices with the vocabulary they index.
    pub fn fingerprint(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for word in &self.words {
            for byte in word.bytes().chain(core::iter::once(0)) {
                hash ^= u64::from(byte);
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        hash
    }
}

/// Counts normalized token frequencies and keeps words occurring at least
/// `min_count` times (values below 1 behave as 1). Ordering is descending
/// frequency, ties broken lexicographically, after the unknown symbol.
pub fn build_vocabulary<'a, I>(sentences: I, min_count: u32) -> Vocabulary
where
    I: IntoIterator<Item = &'a Sentence>,
{
    let min_count = min_count.max(1);
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for sentence in sentences {
        for token in &sentence.tokens {
            *counts.entry(token.normalized.as_str()).or_insert(0) += 1;
        }
    }
    let mut kept: Vec<(&str, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= u64::from(min_count))
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Vocabulary::from_words(kept.into_iter().map(|(w, _)| w), min_count)
}
