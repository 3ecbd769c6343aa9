//! Tokenizer and sentence splitter.
//!
//! Tokens are maximal alphanumeric runs; every other non-whitespace character
//! is its own token. Sentences end at `.`, `?` or `!` when followed by
//! whitespace and a capital letter, or by the end of the text. Byte spans
//! always index the original report, so the source text can be reconstructed
//! from spans plus gaps.

use alloc::string::String;
use alloc::vec::Vec;

use super::lemma::Lemmatizer;
use super::{Sentence, Token};

/// Splits a report into sentences of normalized tokens.
///
/// Empty or whitespace-only text yields no sentences.
pub fn tokenize_and_split(report_text: &str) -> Vec<Sentence> {
    let lemmatizer = Lemmatizer::new();
    tokenize_and_split_with(report_text, &lemmatizer)
}

/// As [`tokenize_and_split`], reusing a caller-held [`Lemmatizer`].
pub fn tokenize_and_split_with(report_text: &str, lemmatizer: &Lemmatizer) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut current: Vec<Token> = Vec::new();

    for (start, end) in token_spans(report_text) {
        let surface = &report_text[start..end];
        current.push(Token {
            surface: String::from(surface),
            normalized: lemmatizer.normalize(surface),
            char_span: (start, end),
        });
        if matches!(surface, "." | "?" | "!") && is_sentence_boundary(report_text, end) {
            sentences.push(Sentence {
                tokens: core::mem::take(&mut current),
                report_id: String::new(),
            });
        }
    }
    if !current.is_empty() {
        sentences.push(Sentence {
            tokens: current,
            report_id: String::new(),
        });
    }
    sentences
}

/// Byte spans of tokens: alphanumeric runs and single punctuation characters.
fn token_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut run_start: Option<usize> = None;
    for (pos, ch) in text.char_indices() {
        if ch.is_alphanumeric() {
            run_start.get_or_insert(pos);
            continue;
        }
        if let Some(start) = run_start.take() {
            spans.push((start, pos));
        }
        if !ch.is_whitespace() {
            spans.push((pos, pos + ch.len_utf8()));
        }
    }
    if let Some(start) = run_start {
        spans.push((start, text.len()));
    }
    spans
}

/// True when the text after byte `pos` is only whitespace, or whitespace
/// followed by a capital letter.
fn is_sentence_boundary(text: &str, pos: usize) -> bool {
    let rest = &text[pos..];
    let trimmed = rest.trim_start();
    if trimmed.is_empty() {
        return true;
    }
    let skipped_whitespace = trimmed.len() < rest.len();
    skipped_whitespace && trimmed.chars().next().is_some_and(char::is_uppercase)
}
