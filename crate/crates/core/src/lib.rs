//! Core algorithms for information extraction from free-text medical reports.
//!
//! The crate covers the whole extraction stack as a plain library with no IO:
//!
//! - [`corpus`]: tokenization, normalization, vocabularies, and the IOBES
//!   tag-grid codec used to move between span annotations and per-token tags.
//! - [`nnkernel`]: a small dense numeric kernel (matrices, a peephole LSTM
//!   cell, softmax/cross-entropy, SGD with Nesterov momentum, AdaGrad, and a
//!   finite-difference gradient checker). No external ML framework.
//! - [`tagger`]: a bidirectional-LSTM joint NER + negation sequence tagger.
//! - [`embeddings`]: four word-embedding schemes (random, corruption language
//!   model, GloVe, and GloVe with an ontology-derived cosine penalty) plus
//!   nearest-neighbor queries.
//! - [`rulener`]: dictionary-based NER with longest-match scanning, character
//!   trigram approximate matching, and redirect fallback.
//! - [`negation`]: NegEx trigger/window classification and a hybrid that
//!   filters it through `neg`/`conj:or` dependency relations.
//! - [`evalkit`]: token-overlap and entity-level metrics with k-fold
//!   cross-validation plumbing.
//!
//! The crate is `no_std`-compatible (with `alloc`); file formats, IO, and the
//! command-line interface live in the companion `radnlp` crate. All float
//! transcendentals go through `libm` so results do not depend on the `std`
//! feature, and all randomized procedures take explicit seeds.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod corpus;
pub mod embeddings;
mod error;
pub mod evalkit;
pub(crate) mod math;
pub mod negation;
pub mod nnkernel;
pub mod rulener;
pub mod tagger;

pub use error::{Error, Result};
