//! Padded character-trigram cosine similarity and an inverted index for
//! approximate dictionary lookup.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

const N: usize = 3;
const PAD: char = '\0';

type Gram = (char, char, char);

/// Multiset of padded character trigrams with its Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
struct GramProfile {
    counts: BTreeMap<Gram, f64>,
    norm: f64,
}

fn profile(s: &str) -> GramProfile {
    let padded: Vec<char> = core::iter::repeat(PAD)
        .take(N - 1)
        .chain(s.chars())
        .chain(core::iter::repeat(PAD).take(N - 1))
        .collect();
    let mut counts: BTreeMap<Gram, f64> = BTreeMap::new();
    for w in padded.windows(N) {
        *counts.entry((w[0], w[1], w[2])).or_insert(0.0) += 1.0;
    }
    let norm = math::sqrt(counts.values().map(|v| v * v).sum());
    GramProfile { counts, norm }
}

fn profile_cosine(a: &GramProfile, b: &GramProfile) -> f64 {
    if a.counts == b.counts {
        return 1.0;
    }
    if a.norm == 0.0 || b.norm == 0.0 {
        return 0.0;
    }
    let (small, large) = if a.counts.len() <= b.counts.len() {
        (a, b)
    } else {
        (b, a)
    };
    let dot: f64 = small
        .counts
        .iter()
        .filter_map(|(g, va)| large.counts.get(g).map(|vb| va * vb))
        .sum();
    dot / (a.norm * b.norm)
}

/// Cosine similarity of padded character-trigram count vectors.
///
/// Identical strings give exactly 1; strings sharing no trigram give 0.
pub fn ngram_cosine(a: &str, b: &str) -> f64 {
    profile_cosine(&profile(a), &profile(b))
}

/// Inverted trigram index over dictionary keys for approximate lookup.
///
/// A candidate must share at least one trigram with the query (cosine is 0
/// otherwise), so scoring the union of posting lists is exact.
#[derive(Debug, Clone)]
pub struct NgramIndex {
    threshold: f64,
    keys: Vec<String>,
    profiles: Vec<GramProfile>,
    postings: BTreeMap<Gram, Vec<u32>>,
}

impl NgramIndex {
    /// Indexes `keys` with similarity threshold `threshold` in `(0, 1]`.
    pub fn build<I, S>(keys: I, threshold: f64) -> Result<NgramIndex>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::InvalidConfig(
                "similarity threshold must be in (0, 1]".to_string(),
            ));
        }
        let mut index = NgramIndex {
            threshold,
            keys: Vec::new(),
            profiles: Vec::new(),
            postings: BTreeMap::new(),
        };
        for key in keys {
            let key = key.as_ref();
            let id = index.keys.len() as u32;
            let prof = profile(key);
            for gram in prof.counts.keys() {
                let posting = index.postings.entry(*gram).or_default();
                if posting.last() != Some(&id) {
                    posting.push(id);
                }
            }
            index.keys.push(key.to_string());
            index.profiles.push(prof);
        }
        Ok(index)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, id: u32) -> &str {
        &self.keys[id as usize]
    }

    /// Keys with cosine similarity >= threshold, ordered by descending
    /// similarity, then shorter key, then lexicographic.
    pub fn lookup(&self, query: &str) -> Vec<(u32, f64)> {
        let q = profile(query);
        let mut candidates: Vec<u32> = q
            .counts
            .keys()
            .filter_map(|g| self.postings.get(g))
            .flatten()
            .copied()
            .collect();
        candidates.sort_unstable();
        candidates.dedup();

        let mut hits: Vec<(u32, f64)> = candidates
            .into_iter()
            .map(|id| (id, profile_cosine(&q, &self.profiles[id as usize])))
            .filter(|&(_, sim)| sim >= self.threshold)
            .collect();
        hits.sort_by(|&(ia, sa), &(ib, sb)| {
            sb.partial_cmp(&sa)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(self.keys[ia as usize].len().cmp(&self.keys[ib as usize].len()))
                .then(self.keys[ia as usize].cmp(&self.keys[ib as usize]))
        });
        hits
    }
}
