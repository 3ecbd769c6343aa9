//! A small deterministic suffix-rule lemmatizer.
//!
//! The exact lemmatizer affects vocabulary identity, so this one is bundled
//! rather than borrowed from an external library: a fixed rule table for
//! plural nouns and common verb inflections, patched by an exception table
//! shipped as a data file. Output is always lower-cased.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

const EXCEPTIONS_TSV: &str = include_str!("../../data/lemma_exceptions.tsv");

/// Suffix-rule lemmatizer with an exception table.
#[derive(Debug, Clone)]
pub struct Lemmatizer {
    exceptions: BTreeMap<String, String>,
}

impl Default for Lemmatizer {
    fn default() -> Self {
        Lemmatizer::new()
    }
}

impl Lemmatizer {
    pub fn new() -> Lemmatizer {
        let mut exceptions = BTreeMap::new();
        for line in EXCEPTIONS_TSV.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (word, lemma) = line
                .split_once('\t')
                .expect("bundled exception table is tab-separated");
            exceptions.insert(word.to_string(), lemma.to_string());
        }
        Lemmatizer { exceptions }
    }

    /// Lower-cases and lemmatizes one token surface form.
    pub fn normalize(&self, surface: &str) -> String {
        let lower = surface.to_lowercase();
        if let Some(lemma) = self.exceptions.get(&lower) {
            return lemma.clone();
        }
        if lower.len() < 4 || !lower.bytes().all(|b| b.is_ascii_lowercase()) {
            return lower;
        }
        apply_suffix_rules(&lower)
    }
}

/// First matching rule wins; input is ASCII lower-case of length >= 4.
fn apply_suffix_rules(word: &str) -> String {
    let n = word.len();

    // Plural nouns (and 3rd-person -s forms).
    if n >= 5 && word.ends_with("ies") {
        return replace_suffix(word, 3, "y");
    }
    if n >= 5 && word.ends_with("ied") {
        return replace_suffix(word, 3, "y");
    }
    if ["sses", "xes", "zes", "ches", "shes"]
        .iter()
        .any(|s| word.ends_with(s))
    {
        return replace_suffix(word, 2, "");
    }
    if word.ends_with("ss") || word.ends_with("us") || word.ends_with("is") {
        return word.to_string();
    }
    if word.ends_with('s') {
        return replace_suffix(word, 1, "");
    }

    // Verb inflections. The -Vred/-Vted groups keep their stem 'e'.
    if word.ends_with("eed") {
        return replace_suffix(word, 1, "");
    }
    if n >= 6
        && ["ated", "ared", "ired", "ured"]
            .iter()
            .any(|s| word.ends_with(s))
    {
        return replace_suffix(word, 1, "");
    }
    if n >= 7
        && ["ating", "aring", "iring", "uring"]
            .iter()
            .any(|s| word.ends_with(s))
    {
        return replace_suffix(word, 3, "e");
    }
    if n >= 5 && word.ends_with("ed") {
        return fix_stem(&word[..n - 2]);
    }
    if n >= 6 && word.ends_with("ing") {
        return fix_stem(&word[..n - 3]);
    }

    word.to_string()
}

fn replace_suffix(word: &str, strip: usize, push: &str) -> String {
    let mut out = String::with_capacity(word.len());
    out.push_str(&word[..word.len() - strip]);
    out.push_str(push);
    out
}

/// Repairs a stem left by stripping -ed/-ing: undoubles final consonants and
/// restores a trailing 'e' where the spelling demands one.
fn fix_stem(stem: &str) -> String {
    let bytes = stem.as_bytes();
    let n = bytes.len();
    if n >= 2 && bytes[n - 1] == bytes[n - 2] && is_doubling_consonant(bytes[n - 1]) {
        return stem[..n - 1].to_string();
    }
    let last = bytes[n - 1];
    let restore_e = match last {
        b'c' | b'u' | b'v' | b'z' => true,
        b's' => n >= 2 && is_vowel(bytes[n - 2]),
        b'g' => n >= 2 && bytes[n - 2] == b'r',
        _ => false,
    };
    if restore_e {
        let mut out = stem.to_string();
        out.push('e');
        return out;
    }
    // Short consonant-vowel-consonant stems ("not" from "noted") take an 'e';
    // final w/x/y never trigger this.
    if n == 3
        && !is_vowel(bytes[0])
        && is_vowel(bytes[1])
        && !is_vowel(bytes[2])
        && !matches!(bytes[2], b'w' | b'x' | b'y')
    {
        let mut out = stem.to_string();
        out.push('e');
        return out;
    }
    stem.to_string()
}

fn is_vowel(b: u8) -> bool {
    matches!(b, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn is_doubling_consonant(b: u8) -> bool {
    // ll/ss/zz stay doubled (fall, miss, buzz).
    matches!(b, b'b' | b'd' | b'f' | b'g' | b'm' | b'n' | b'p' | b'r' | b't')
}
