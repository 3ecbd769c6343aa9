//! On-disk formats.

pub mod brat;
pub mod checkpoint;
pub mod conllu;
pub mod embeddings;
pub mod reports;
pub mod taggrid;
pub mod tsv;
pub mod vocab;
