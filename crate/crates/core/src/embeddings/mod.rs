//! Word-embedding schemes and queries.
//!
//! Four ways to produce the `|V| x d` matrix consumed by the tagger:
//!
//! - [`random_embeddings`]: uniform in the open interval (-0.01, 0.01);
//! - [`corruption_lm_train`]: the BiLSTM trunk trained as a language model
//!   that detects randomly replaced words;
//! - [`glove_train`]: weighted least-squares regression of word-pair dot
//!   products onto log co-occurrence counts, trained with AdaGrad;
//! - [`glove_ontology_train`]: the same objective with the regression target
//!   shifted by `alpha * cos(phi_i, phi_j)`, where `phi` are binary ancestor
//!   vectors from an ontology tree, pulling ontology-related words together.
//!
//! Plus cosine nearest-neighbor and vector-arithmetic queries over any
//! trained matrix.

mod cooccur;
mod glove;
mod lm;
mod ontology;
mod query;

pub use cooccur::{build_cooccurrence, CooccurrenceTable};
pub use glove::{
    glove_objective, glove_objective_and_grads, glove_ontology_train, glove_train, weighting,
    GloveConfig, GloveOutcome, GloveParams,
};
pub use lm::{corrupt_sentence, corruption_lm_train, CorruptionLmConfig};
pub use ontology::{build_ancestor_vectors, AncestorVectorSet, OntologyEdge, OntologyTree};
pub use query::{cosine_similarity, nearest_neighbors, nearest_to_vector, probe_vector, Neighbor};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::nnkernel::Matrix;

/// A `|V| x d` embedding matrix tied to the vocabulary it indexes.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    /// Row `j` is the vector of vocabulary word `j`.
    pub matrix: Matrix,
    /// Fingerprint of the vocabulary (see `Vocabulary::fingerprint`).
    pub vocab_fingerprint: u64,
}

impl EmbeddingMatrix {
    pub fn vocab_size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }
}

/// Seeded random embeddings, every entry strictly inside (-0.01, 0.01).
pub fn random_embeddings(
    vocab_size: usize,
    dim: usize,
    seed: u64,
    vocab_fingerprint: u64,
) -> EmbeddingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EmbeddingMatrix {
        matrix: Matrix::uniform(vocab_size, dim, -0.01, 0.01, &mut rng),
        vocab_fingerprint,
    }
}
