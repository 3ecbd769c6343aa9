//! Co-occurrence embedding trainer.
//!
//! Minimizes
//!
//! ```text
//! sum over nonzero X_ij of  f(X_ij) * (w_i . w~_j + b_i + b~_j - target_ij)^2
//! target_ij = ln X_ij + alpha * cos(phi_i, phi_j)
//! ```
//!
//! with `f(x) = min(1, (x / x_max)^exponent)`. `alpha = 0` (or an all-zero
//! ancestor set) recovers the plain objective bit-for-bit: both entry points
//! share one code path and one RNG stream. The penalty enters purely as a
//! target shift, so the AdaGrad update itself is unchanged.
//!
//! Entries are sampled stochastically (shuffled each epoch); updates use the
//! exact gradient of each term, with per-parameter AdaGrad scaling. The final
//! embedding is the average `(w + w~) / 2`.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::nnkernel::{adagrad_update, Matrix};

use super::{AncestorVectorSet, CooccurrenceTable, EmbeddingMatrix};

/// Hyperparameters for [`glove_train`] / [`glove_ontology_train`].
#[derive(Debug, Clone, PartialEq)]
pub struct GloveConfig {
    pub dim: usize,
    /// Weighting-function cap.
    pub x_max: f64,
    /// Weighting-function exponent.
    pub weight_exponent: f64,
    pub learning_rate: f64,
    pub epsilon: f64,
    pub epochs: usize,
    /// Ontology-penalty weight; 0 disables the penalty.
    pub alpha: f64,
    pub seed: u64,
}

impl Default for GloveConfig {
    fn default() -> Self {
        GloveConfig {
            dim: 50,
            x_max: 100.0,
            weight_exponent: 0.75,
            learning_rate: 0.05,
            epsilon: 1e-8,
            epochs: 25,
            alpha: 0.0,
            seed: 1,
        }
    }
}

impl GloveConfig {
    fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.epochs == 0 {
            return Err(Error::InvalidConfig("dim and epochs must be > 0".to_string()));
        }
        if self.x_max <= 0.0 || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig(
                "x_max and learning_rate must be > 0".to_string(),
            ));
        }
        if self.alpha < 0.0 {
            return Err(Error::InvalidConfig("alpha must be >= 0".to_string()));
        }
        Ok(())
    }
}

/// Weighting function: monotone, `f(0) = 0`, capped at 1 for `x >= x_max`.
pub fn weighting(x: f64, x_max: f64, exponent: f64) -> f64 {
    if x >= x_max {
        1.0
    } else if x <= 0.0 {
        0.0
    } else {
        math::powf(x / x_max, exponent)
    }
}

/// Word vectors, context vectors, and the two bias vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct GloveParams {
    pub w: Matrix,
    pub w_context: Matrix,
    pub b: Matrix,
    pub b_context: Matrix,
}

impl GloveParams {
    /// All four tensors uniform in `(-0.5, 0.5) / dim`, seeded.
    pub fn init(vocab_size: usize, dim: usize, rng: &mut ChaCha8Rng) -> GloveParams {
        let bound = 0.5 / dim as f64;
        GloveParams {
            w: Matrix::uniform(vocab_size, dim, -bound, bound, rng),
            w_context: Matrix::uniform(vocab_size, dim, -bound, bound, rng),
            b: Matrix::uniform(1, vocab_size, -bound, bound, rng),
            b_context: Matrix::uniform(1, vocab_size, -bound, bound, rng),
        }
    }

    pub fn zeros(vocab_size: usize, dim: usize) -> GloveParams {
        GloveParams {
            w: Matrix::zeros(vocab_size, dim),
            w_context: Matrix::zeros(vocab_size, dim),
            b: Matrix::vector(vocab_size),
            b_context: Matrix::vector(vocab_size),
        }
    }

    fn prediction(&self, i: u32, j: u32) -> f64 {
        math::dot(self.w.row(i as usize), self.w_context.row(j as usize))
            + self.b.as_slice()[i as usize]
            + self.b_context.as_slice()[j as usize]
    }
}

/// One prepared regression target per nonzero table cell.
struct Entry {
    i: u32,
    j: u32,
    weight: f64,
    target: f64,
}

fn prepare_entries(
    table: &CooccurrenceTable,
    config: &GloveConfig,
    phi: &AncestorVectorSet,
) -> Vec<Entry> {
    table
        .entries()
        .map(|(i, j, x)| Entry {
            i,
            j,
            weight: weighting(x, config.x_max, config.weight_exponent),
            target: math::ln(x) + config.alpha * phi.cosine(i, j),
        })
        .collect()
}

/// Full objective value at the given parameters.
pub fn glove_objective(
    table: &CooccurrenceTable,
    params: &GloveParams,
    config: &GloveConfig,
    phi: &AncestorVectorSet,
) -> f64 {
    prepare_entries(table, config, phi)
        .iter()
        .map(|e| {
            let err = params.prediction(e.i, e.j) - e.target;
            e.weight * err * err
        })
        .sum()
}

/// Objective value plus its exact dense gradient, for gradient checking.
pub fn glove_objective_and_grads(
    table: &CooccurrenceTable,
    params: &GloveParams,
    config: &GloveConfig,
    phi: &AncestorVectorSet,
) -> (f64, GloveParams) {
    let mut grads = GloveParams::zeros(params.w.rows(), params.w.cols());
    let mut total = 0.0;
    for e in prepare_entries(table, config, phi) {
        let err = params.prediction(e.i, e.j) - e.target;
        total += e.weight * err * err;
        let fdiff = 2.0 * e.weight * err;
        let (i, j) = (e.i as usize, e.j as usize);
        math::axpy(fdiff, params.w_context.row(j), grads.w.row_mut(i));
        math::axpy(fdiff, params.w.row(i), grads.w_context.row_mut(j));
        grads.b.as_mut_slice()[i] += fdiff;
        grads.b_context.as_mut_slice()[j] += fdiff;
    }
    (total, grads)
}

/// Trained embeddings plus the per-epoch objective log.
#[derive(Debug, Clone, PartialEq)]
pub struct GloveOutcome {
    pub embeddings: EmbeddingMatrix,
    pub params: GloveParams,
    /// Running objective of each epoch (term values before their update).
    pub epoch_objectives: Vec<f64>,
}

/// Plain trainer: [`glove_ontology_train`] with a zero penalty.
pub fn glove_train(table: &CooccurrenceTable, config: &GloveConfig) -> Result<GloveOutcome> {
    let mut cfg = config.clone();
    cfg.alpha = 0.0;
    glove_ontology_train(table, &cfg, &AncestorVectorSet::zeros(table.vocab_size()))
}

/// Ontology-penalized trainer. All randomness comes from `config.seed`.
pub fn glove_ontology_train(
    table: &CooccurrenceTable,
    config: &GloveConfig,
    phi: &AncestorVectorSet,
) -> Result<GloveOutcome> {
    config.validate()?;
    if table.is_empty() {
        return Err(Error::EmptyInput("co-occurrence table".to_string()));
    }
    if phi.len() != table.vocab_size() {
        return Err(Error::LengthMismatch {
            context: "ancestor vectors vs vocabulary".to_string(),
            expected: table.vocab_size(),
            got: phi.len(),
        });
    }
    let vocab_size = table.vocab_size();
    let entries = prepare_entries(table, config, phi);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = GloveParams::init(vocab_size, config.dim, &mut rng);
    let mut accum = GloveParams::zeros(vocab_size, config.dim);
    let mut order: Vec<usize> = (0..entries.len()).collect();
    let mut epoch_objectives = Vec::with_capacity(config.epochs);
    let mut grad_i = alloc::vec![0.0; config.dim];
    let mut grad_j = alloc::vec![0.0; config.dim];

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut running = 0.0;
        for &idx in &order {
            let e = &entries[idx];
            let (i, j) = (e.i as usize, e.j as usize);
            let err = params.prediction(e.i, e.j) - e.target;
            running += e.weight * err * err;
            let fdiff = 2.0 * e.weight * err;

            for d in 0..config.dim {
                grad_i[d] = fdiff * params.w_context.get(j, d);
                grad_j[d] = fdiff * params.w.get(i, d);
            }
            for d in 0..config.dim {
                adagrad_update(
                    &mut params.w.row_mut(i)[d],
                    &mut accum.w.row_mut(i)[d],
                    grad_i[d],
                    config.learning_rate,
                    config.epsilon,
                );
                adagrad_update(
                    &mut params.w_context.row_mut(j)[d],
                    &mut accum.w_context.row_mut(j)[d],
                    grad_j[d],
                    config.learning_rate,
                    config.epsilon,
                );
            }
            adagrad_update(
                &mut params.b.as_mut_slice()[i],
                &mut accum.b.as_mut_slice()[i],
                fdiff,
                config.learning_rate,
                config.epsilon,
            );
            adagrad_update(
                &mut params.b_context.as_mut_slice()[j],
                &mut accum.b_context.as_mut_slice()[j],
                fdiff,
                config.learning_rate,
                config.epsilon,
            );
        }
        if !running.is_finite() {
            return Err(Error::NonFiniteLoss(alloc::format!(
                "co-occurrence embedding training, epoch {epoch}"
            )));
        }
        epoch_objectives.push(running);
    }

    let mut matrix = Matrix::zeros(vocab_size, config.dim);
    for r in 0..vocab_size {
        for d in 0..config.dim {
            matrix.set(r, d, 0.5 * (params.w.get(r, d) + params.w_context.get(r, d)));
        }
    }
    if !matrix.all_finite() {
        return Err(Error::NonFiniteLoss("final embedding matrix".to_string()));
    }
    Ok(GloveOutcome {
        embeddings: EmbeddingMatrix {
            matrix,
            vocab_fingerprint: table.vocab_fingerprint(),
        },
        params,
        epoch_objectives,
    })
}
