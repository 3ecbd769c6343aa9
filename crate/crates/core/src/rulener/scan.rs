//! Greedy longest-match phrase scanning.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{EntityClass, Sentence};

use super::{NgramIndex, TermDictionary};

/// Spelling-variant table: normalized phrase -> canonical phrase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RedirectTable {
    map: BTreeMap<String, String>,
}

impl RedirectTable {
    pub fn new() -> RedirectTable {
        RedirectTable::default()
    }

    pub fn insert(&mut self, from: &str, to: &str) {
        self.map.insert(from.to_string(), to.to_string());
    }

    pub fn get(&self, phrase: &str) -> Option<&str> {
        self.map.get(phrase).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Canonical phrases that do not resolve in the dictionary.
    pub fn dangling(&self, dict: &TermDictionary) -> Vec<&str> {
        self.map
            .values()
            .map(String::as_str)
            .filter(|v| !dict.contains(v))
            .collect()
    }
}

/// How a phrase was matched.
#[derive(Debug, Clone, PartialEq)]
pub enum MatchKind {
    Exact,
    Approximate { key: String, similarity: f64 },
    Redirect { canonical: String },
}

/// One scan hit: token range `[start, end)` and the matched group.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseMatch {
    pub start: usize,
    pub end: usize,
    pub group: EntityClass,
    pub kind: MatchKind,
}

/// Scanner knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    /// Longest candidate phrase in tokens; keeps scanning linear.
    pub max_phrase_len: usize,
    /// Whether approximate matching applies to multi-word phrases too
    /// (single words always qualify when an index is supplied).
    pub approx_multiword: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            max_phrase_len: 6,
            approx_multiword: true,
        }
    }
}

/// Greedy left-to-right longest-match scan over normalized tokens.
///
/// At each position, candidate phrases are tried longest-first; each
/// candidate goes through (1) exact dictionary lookup, (2) approximate
/// lookup when an index is supplied, (3) redirect resolution into the
/// dictionary. A successful match emits one [`PhraseMatch`] per group of
/// the resolved key and the scan advances past the phrase, so output
/// ranges never overlap and are sorted.
pub fn scan_sentence(
    sentence: &Sentence,
    dict: &TermDictionary,
    index: Option<&NgramIndex>,
    redirects: Option<&RedirectTable>,
    config: &ScanConfig,
) -> Vec<PhraseMatch> {
    let tokens = sentence.normalized();
    let n = tokens.len();
    let mut matches = Vec::new();
    let mut i = 0;
    while i < n {
        let longest = config.max_phrase_len.min(n - i).max(1);
        let mut advanced = false;
        for len in (1..=longest).rev() {
            let phrase = tokens[i..i + len].join(" ");
            if let Some(found) = match_phrase(&phrase, dict, index, redirects, config, len) {
                for (group, kind) in found {
                    matches.push(PhraseMatch {
                        start: i,
                        end: i + len,
                        group,
                        kind,
                    });
                }
                i += len;
                advanced = true;
                break;
            }
        }
        if !advanced {
            i += 1;
        }
    }
    matches
}

fn match_phrase(
    phrase: &str,
    dict: &TermDictionary,
    index: Option<&NgramIndex>,
    redirects: Option<&RedirectTable>,
    config: &ScanConfig,
    len: usize,
) -> Option<Vec<(EntityClass, MatchKind)>> {
    if let Some(entries) = dict.get(phrase) {
        return Some(
            entries
                .iter()
                .map(|e| (e.group, MatchKind::Exact))
                .collect(),
        );
    }
    if let Some(index) = index {
        if len == 1 || config.approx_multiword {
            // Best key (by similarity, then shorter, then lexicographic)
            // that resolves in the dictionary.
            for (key_id, similarity) in index.lookup(phrase) {
                let key = index.key(key_id);
                if let Some(entries) = dict.get(key) {
                    return Some(
                        entries
                            .iter()
                            .map(|e| {
                                (
                                    e.group,
                                    MatchKind::Approximate {
                                        key: key.to_string(),
                                        similarity,
                                    },
                                )
                            })
                            .collect(),
                    );
                }
            }
        }
    }
    if let Some(redirects) = redirects {
        if let Some(canonical) = redirects.get(phrase) {
            if let Some(entries) = dict.get(canonical) {
                return Some(
                    entries
                        .iter()
                        .map(|e| {
                            (
                                e.group,
                                MatchKind::Redirect {
                                    canonical: canonical.to_string(),
                                },
                            )
                        })
                        .collect(),
                );
            }
        }
    }
    None
}
