//! Cosine nearest-neighbor and vector-arithmetic queries.

use alloc::vec::Vec;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::math;
use crate::nnkernel::Matrix;

use super::EmbeddingMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub word_id: u32,
    pub similarity: f64,
}

/// Cosine similarity; zero-norm vectors compare as 0.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    let na = math::sqrt(math::dot(a, a));
    let nb = math::sqrt(math::dot(b, b));
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        math::dot(a, b) / (na * nb)
    }
}

/// Top-`m` rows by cosine similarity to `probe`, skipping ids in `exclude`.
/// Ties break by (higher similarity, then lower word id).
pub fn nearest_to_vector(
    matrix: &Matrix,
    probe: &[f64],
    m: usize,
    exclude: &[u32],
) -> Vec<Neighbor> {
    let mut scored: Vec<Neighbor> = (0..matrix.rows() as u32)
        .filter(|id| !exclude.contains(id))
        .map(|id| Neighbor {
            word_id: id,
            similarity: cosine_similarity(matrix.row(id as usize), probe),
        })
        .collect();
    scored.sort_by(|a, b| {
        b.similarity
            .partial_cmp(&a.similarity)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.word_id.cmp(&b.word_id))
    });
    scored.truncate(m);
    scored
}

/// Top-`m` neighbors of one word, excluding the word itself.
pub fn nearest_neighbors(
    embeddings: &EmbeddingMatrix,
    vocabulary: &Vocabulary,
    word: &str,
    m: usize,
) -> Result<Vec<Neighbor>> {
    let id = vocabulary
        .word_id(word)
        .ok_or_else(|| Error::OutOfVocabulary(alloc::string::String::from(word)))?;
    Ok(nearest_to_vector(
        &embeddings.matrix,
        embeddings.matrix.row(id as usize),
        m,
        &[id],
    ))
}

/// Sum/difference probe for vector-arithmetic queries. Terms are
/// `(word, +1.0 | -1.0)`; the probe is the signed sum of their vectors and
/// the returned ids are the operands (callers usually exclude them).
pub fn probe_vector(
    embeddings: &EmbeddingMatrix,
    vocabulary: &Vocabulary,
    terms: &[(&str, f64)],
) -> Result<(Vec<f64>, Vec<u32>)> {
    if terms.is_empty() {
        return Err(Error::EmptyInput(alloc::string::String::from(
            "vector-arithmetic expression",
        )));
    }
    let mut probe = alloc::vec![0.0; embeddings.dim()];
    let mut ids = Vec::with_capacity(terms.len());
    for &(word, sign) in terms {
        let id = vocabulary
            .word_id(word)
            .ok_or_else(|| Error::OutOfVocabulary(alloc::string::String::from(word)))?;
        math::axpy(sign, embeddings.matrix.row(id as usize), &mut probe);
        ids.push(id);
    }
    Ok((probe, ids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;

    fn embeddings(rows: Vec<Vec<f64>>) -> EmbeddingMatrix {
        let dim = rows[0].len();
        let mut m = Matrix::zeros(rows.len(), dim);
        for (r, row) in rows.iter().enumerate() {
            m.row_mut(r).copy_from_slice(row);
        }
        EmbeddingMatrix {
            matrix: m,
            vocab_fingerprint: 0,
        }
    }

    #[test]
    fn duplicated_row_is_rank_one_with_similarity_one() {
        let vocab = Vocabulary::from_words(["a", "b", "c"], 1);
        // "c" duplicates "a"'s vector.
        let e = embeddings(alloc::vec![
            alloc::vec![0.0, 0.1],
            alloc::vec![1.0, 2.0],
            alloc::vec![-3.0, 1.0],
            alloc::vec![1.0, 2.0],
        ]);
        let out = nearest_neighbors(&e, &vocab, "a", 2).unwrap();
        assert_eq!(out[0].word_id, vocab.word_id("c").unwrap());
        assert!((out[0].similarity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_rows_tie_break_by_index() {
        let vocab = Vocabulary::from_words(["a", "b", "c"], 1);
        let e = embeddings(alloc::vec![
            alloc::vec![0.0, 0.0, 1.0],
            alloc::vec![1.0, 0.0, 0.0],
            alloc::vec![0.0, 1.0, 0.0],
            alloc::vec![0.0, 0.0, 2.0],
        ]);
        let out = nearest_neighbors(&e, &vocab, "a", 3).unwrap();
        // b and c are both orthogonal to a (similarity 0); index order wins.
        assert_eq!(out[0].similarity, 0.0);
        assert_eq!(out[0].word_id, 0); // <unk> row is all zeros -> 0 too
        assert_eq!(out[1].word_id, vocab.word_id("b").unwrap());
        assert_eq!(out[2].word_id, vocab.word_id("c").unwrap());
    }

    #[test]
    fn out_of_vocabulary_query_errors() {
        let vocab = Vocabulary::from_words(["a"], 1);
        let e = embeddings(alloc::vec![alloc::vec![0.0], alloc::vec![1.0]]);
        assert!(matches!(
            nearest_neighbors(&e, &vocab, "zzz", 1),
            Err(Error::OutOfVocabulary(_))
        ));
    }

    #[test]
    fn arithmetic_probe_sums_signed_vectors() {
        let vocab = Vocabulary::from_words(["a", "b"], 1);
        let e = embeddings(alloc::vec![
            alloc::vec![0.0, 0.0],
            alloc::vec![1.0, 2.0],
            alloc::vec![0.5, -1.0],
        ]);
        let (probe, ids) =
            probe_vector(&e, &vocab, &[("a", 1.0), ("b", -1.0)]).unwrap();
        assert_eq!(probe, alloc::vec![0.5, 3.0]);
        assert_eq!(ids.len(), 2);
    }
}
