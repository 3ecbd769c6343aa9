//! Dictionary-based NER.
//!
//! A term dictionary maps normalized single- or multi-word phrases to
//! semantic groups. It is built from an ontology tree by walking each
//! concept's ancestor chain up to a manually group-mapped concept, plus
//! hand-curated extra terms. Scanning is greedy longest-match over
//! normalized tokens with three fallbacks per candidate phrase: exact
//! lookup, approximate lookup via padded character-trigram cosine
//! similarity, and a redirect table resolving spelling variants to their
//! canonical dictionary form.

mod dictionary;
mod ngram;
mod scan;

pub use dictionary::{
    build_dictionary, DictEntry, DictionaryBuildReport, GroupMapping, Provenance, TermDictionary,
};
pub use ngram::{ngram_cosine, NgramIndex};
pub use scan::{scan_sentence, MatchKind, PhraseMatch, RedirectTable, ScanConfig};
