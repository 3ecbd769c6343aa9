//! Corruption language model.
//!
//! The BiLSTM trunk is reused for a self-supervised task: each input word is
//! replaced with probability `p_replace` by a word drawn uniformly from the
//! vocabulary, and the network predicts, per token, whether it was replaced
//! (label 0) or left intact (label 1). After training, the embedding matrix
//! rows are the product. Corruption is resampled every epoch from the same
//! seeded stream.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nnkernel::{Matrix, NesterovSgd};
use crate::tagger::{self, TaggerConfig, TaggerParams, TrainItem, TrainReport};

use super::EmbeddingMatrix;

/// Configuration: the trunk hyperparameters plus the replacement rate.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionLmConfig {
    /// Probability of replacing each input word.
    pub p_replace: f64,
    /// Trunk hyperparameters. `channels`/`tags` are forced to 1/2.
    pub tagger: TaggerConfig,
}

impl Default for CorruptionLmConfig {
    fn default() -> Self {
        CorruptionLmConfig {
            p_replace: 0.2,
            tagger: TaggerConfig::default(),
        }
    }
}

/// Tag index meaning "this word was replaced".
pub const LABEL_REPLACED: usize = 0;
/// Tag index meaning "this word is intact".
pub const LABEL_INTACT: usize = 1;

/// Corrupts one encoded sentence: every position is replaced with
/// probability `p` by a uniform draw from `0..vocab_size`. Returns the
/// corrupted ids and per-token labels (0 replaced, 1 intact).
pub fn corrupt_sentence(
    ids: &[u32],
    vocab_size: u32,
    p: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<u32>, Vec<usize>) {
    let mut out = Vec::with_capacity(ids.len());
    let mut labels = Vec::with_capacity(ids.len());
    for &id in ids {
        if rng.gen_range(0.0..1.0) < p {
            out.push(rng.gen_range(0..vocab_size));
            labels.push(LABEL_REPLACED);
        } else {
            out.push(id);
            labels.push(LABEL_INTACT);
        }
    }
    (out, labels)
}

/// Trains the corruption language model and returns the learned embedding
/// rows plus the per-epoch loss log.
pub fn corruption_lm_train(
    sentences: &[Vec<u32>],
    vocab_size: usize,
    vocab_fingerprint: u64,
    config: &CorruptionLmConfig,
) -> Result<(EmbeddingMatrix, TrainReport)> {
    if sentences.is_empty() || sentences.iter().all(Vec::is_empty) {
        return Err(Error::EmptyInput("corruption language model corpus".to_string()));
    }
    if !(config.p_replace > 0.0 && config.p_replace < 1.0) {
        return Err(Error::InvalidConfig("p_replace must be in (0, 1)".to_string()));
    }
    let mut cfg = config.tagger.clone();
    cfg.channels = 1;
    cfg.tags = 2;
    // The point is to learn W, so the embedding is always trainable here.
    cfg.fine_tune_embeddings = true;
    cfg.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let init = Matrix::uniform(vocab_size, cfg.embedding_dim, -0.01, 0.01, &mut rng);
    let mut params = TaggerParams::init(&cfg, init, &mut rng)?;
    let mut opt = NesterovSgd::new(cfg.learning_rate, cfg.momentum, cfg.clip_norm)?;
    let mut grads = params.zeros_like();

    // Pre-chunk long sentences once; corruption happens per epoch.
    let mut base: Vec<&[u32]> = Vec::new();
    for s in sentences {
        if s.is_empty() {
            continue;
        }
        for chunk in s.chunks(cfg.max_len) {
            base.push(chunk);
        }
    }

    let mut order: Vec<usize> = (0..base.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let items: Vec<TrainItem> = base
            .iter()
            .map(|ids| {
                let (word_ids, targets) =
                    corrupt_sentence(ids, vocab_size as u32, config.p_replace, &mut rng);
                TrainItem { word_ids, targets }
            })
            .collect();
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch_ids in order.chunks(cfg.batch_size) {
            let batch: Vec<&TrainItem> = batch_ids.iter().map(|&i| &items[i]).collect();
            epoch_loss += tagger::train_batch(&mut params, &cfg, &batch, &mut grads, &mut opt)?
                * batch.len() as f64;
        }
        let mean = epoch_loss / base.len() as f64;
        if !mean.is_finite() {
            return Err(Error::NonFiniteLoss(alloc::format!(
                "corruption language model, epoch {epoch}"
            )));
        }
        epoch_losses.push(mean);
    }

    Ok((
        EmbeddingMatrix {
            matrix: params.embedding,
            vocab_fingerprint,
        },
        TrainReport { epoch_losses },
    ))
}
