//! File formats, IO, and pipeline glue for the `radnlp-core` algorithms.
//!
//! The core crate is IO-free; everything that touches the filesystem lives
//! here: BRAT standoff corpora, CoNLL-U dependency parses, tag-grid files,
//! embedding text files, parameter checkpoints, the TSV side tables
//! (dictionaries, redirects, triggers, ontology edges, group mappings), the
//! flat key=value configuration format, and JSON reports. The `radnlp`
//! binary wires these into subcommands.

pub mod config;
pub mod formats;
pub mod pipeline;
