//! Joint NER + negation sequence tagger.
//!
//! Architecture: an embedding lookup feeds two LSTM layers running in
//! opposite directions; their outputs are concatenated per position, padded
//! to `max_len`, flattened to a `2 * k * max_len` vector, and passed through
//! one linear layer whose output reshapes to `n x C x T`. Softmax over the
//! last axis gives per-token, per-channel tag probabilities. Shorter inputs
//! are masked and the output is cropped; masked hidden rows are zero before
//! flattening.
//!
//! The flattened projection is position-dependent by construction. A
//! per-position `2k -> C*T` projection is available behind
//! [`TaggerConfig::positionwise_projection`] as a documented variant
//! (default off).
//!
//! Sentences longer than `max_len` are split into consecutive `max_len`
//! chunks, each tagged independently.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Tag, TagGrid, NUM_CHANNELS, NUM_TAGS};
use crate::error::{Error, Result};
use crate::math;
use crate::nnkernel::{
    lstm_layer_backward, lstm_layer_forward, softmax_xent, LstmCellParams, LstmLayerCache, Matrix,
    NesterovSgd,
};

/// Hyperparameters of the tagger.
///
/// `channels` and `tags` are 5 for the NER + negation task; the corruption
/// language model reuses the same trunk with `channels = 1`, `tags = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerConfig {
    /// Embedding size `d`.
    pub embedding_dim: usize,
    /// LSTM cells per layer `k`.
    pub cell_size: usize,
    /// Maximum input length; longer sentences are chunked.
    pub max_len: usize,
    /// Output channels `C`.
    pub channels: usize,
    /// Tags per channel `T`.
    pub tags: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub clip_norm: f64,
    /// When false, the embedding matrix is frozen during training.
    pub fine_tune_embeddings: bool,
    /// Peephole connections in the LSTM cells (ablation flag).
    pub use_peepholes: bool,
    /// Use a per-position `2k -> C*T` projection instead of the flattened
    /// `2*k*max_len -> max_len*C*T` layer.
    pub positionwise_projection: bool,
    pub seed: u64,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        TaggerConfig {
            embedding_dim: 50,
            cell_size: 100,
            max_len: 40,
            channels: NUM_CHANNELS,
            tags: NUM_TAGS,
            epochs: 20,
            batch_size: 10,
            learning_rate: 0.5,
            momentum: 0.9,
            clip_norm: 5.0,
            fine_tune_embeddings: true,
            use_peepholes: true,
            positionwise_projection: false,
            seed: 1,
        }
    }
}

impl TaggerConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("embedding_dim", self.embedding_dim),
            ("cell_size", self.cell_size),
            ("max_len", self.max_len),
            ("channels", self.channels),
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(alloc::format!("{name} must be > 0")));
            }
        }
        if self.tags < 2 {
            return Err(Error::InvalidConfig("tags must be >= 2".to_string()));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig("learning_rate must be > 0".to_string()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig("momentum must be in [0, 1)".to_string()));
        }
        Ok(())
    }

    /// Width of the projection input.
    fn proj_in(&self) -> usize {
        if self.positionwise_projection {
            2 * self.cell_size
        } else {
            2 * self.cell_size * self.max_len
        }
    }

    /// Width of the projection output.
    fn proj_out(&self) -> usize {
        if self.positionwise_projection {
            self.channels * self.tags
        } else {
            self.max_len * self.channels * self.tags
        }
    }
}

/// All trainable tensors of the tagger.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerParams {
    /// `|V| x d` embedding matrix; row `j` embeds vocabulary word `j`.
    pub embedding: Matrix,
    pub fwd: LstmCellParams,
    pub bwd: LstmCellParams,
    pub proj_w: Matrix,
    pub proj_b: Matrix,
}

impl TaggerParams {
    /// Initializes LSTM and projection weights from the seeded RNG and
    /// adopts `embedding` as the initial embedding matrix.
    pub fn init(config: &TaggerConfig, embedding: Matrix, rng: &mut ChaCha8Rng) -> Result<Self> {
        config.validate()?;
        if embedding.cols() != config.embedding_dim {
            return Err(Error::Shape(alloc::format!(
                "embedding width {} != configured d {}",
                embedding.cols(),
                config.embedding_dim
            )));
        }
        let d = config.embedding_dim;
        let k = config.cell_size;
        Ok(TaggerParams {
            embedding,
            fwd: LstmCellParams::init(d, k, config.use_peepholes, rng),
            bwd: LstmCellParams::init(d, k, config.use_peepholes, rng),
            proj_w: Matrix::xavier(config.proj_in(), config.proj_out(), rng),
            proj_b: Matrix::vector(config.proj_out()),
        })
    }

    pub fn zeros_like(&self) -> Self {
        TaggerParams {
            embedding: self.embedding.zeros_like(),
            fwd: self.fwd.zeros_like(),
            bwd: self.bwd.zeros_like(),
            proj_w: self.proj_w.zeros_like(),
            proj_b: self.proj_b.zeros_like(),
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.embedding.rows()
    }

    /// Named tensor views in a fixed order (used by the optimizer, the
    /// checkpoint format, and the gradient checker).
    pub fn tensors(&self) -> Vec<(String, &Matrix)> {
        let mut out = Vec::with_capacity(33);
        out.push(("embedding".to_string(), &self.embedding));
        out.extend(self.fwd.tensors("fwd."));
        out.extend(self.bwd.tensors("bwd."));
        out.push(("proj.w".to_string(), &self.proj_w));
        out.push(("proj.b".to_string(), &self.proj_b));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<(String, &mut Matrix)> {
        let mut out: Vec<(String, &mut Matrix)> = Vec::with_capacity(33);
        out.push(("embedding".to_string(), &mut self.embedding));
        out.extend(self.fwd.tensors_mut("fwd."));
        out.extend(self.bwd.tensors_mut("bwd."));
        out.push(("proj.w".to_string(), &mut self.proj_w));
        out.push(("proj.b".to_string(), &mut self.proj_b));
        out
    }

    /// Overwrites all tensors from a list in [`Self::tensors`] order.
    pub fn set_from_tensor_list(&mut self, tensors: &[Matrix]) {
        let mut mine = self.tensors_mut();
        assert_eq!(mine.len(), tensors.len(), "tensor list length");
        for ((_, dst), src) in mine.iter_mut().zip(tensors) {
            assert_eq!(dst.shape(), src.shape(), "tensor shape");
            dst.as_mut_slice().copy_from_slice(src.as_slice());
        }
    }
}

/// Per-token, per-channel tag probabilities: an `n x C x T` tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct TagProbs {
    n: usize,
    channels: usize,
    tags: usize,
    data: Vec<f64>,
}

impl TagProbs {
    pub fn n_tokens(&self) -> usize {
        self.n
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn tags(&self) -> usize {
        self.tags
    }

    /// The length-`T` simplex slice for one (token, channel) cell.
    pub fn cell(&self, token: usize, channel: usize) -> &[f64] {
        let base = (token * self.channels + channel) * self.tags;
        &self.data[base..base + self.tags]
    }

    pub fn get(&self, token: usize, channel: usize, tag: usize) -> f64 {
        self.data[(token * self.channels + channel) * self.tags + tag]
    }

    fn append(&mut self, other: TagProbs) {
        debug_assert_eq!(self.channels, other.channels);
        debug_assert_eq!(self.tags, other.tags);
        self.n += other.n;
        self.data.extend(other.data);
    }
}

/// One training item: encoded words plus row-major `n x C` target tag
/// indices (each `< T`).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainItem {
    pub word_ids: Vec<u32>,
    pub targets: Vec<usize>,
}

impl TrainItem {
    /// Pairs an encoded sentence with its gold IOBES grid
    /// (`channels = 5`, `tags = 5`).
    pub fn from_grid(word_ids: Vec<u32>, grid: &TagGrid) -> Result<TrainItem> {
        if grid.n_tokens() != word_ids.len() {
            return Err(Error::LengthMismatch {
                context: "tag grid vs word ids".to_string(),
                expected: word_ids.len(),
                got: grid.n_tokens(),
            });
        }
        let mut targets = Vec::with_capacity(word_ids.len() * NUM_CHANNELS);
        for t in 0..grid.n_tokens() {
            targets.extend(grid.row(t).iter().map(|tag| tag.index()));
        }
        Ok(TrainItem { word_ids, targets })
    }
}

struct ChunkForward {
    n: usize,
    emb: Matrix,
    h_fwd: Matrix,
    h_bwd: Matrix,
    cache_fwd: LstmLayerCache,
    cache_bwd: LstmLayerCache,
    logits: Vec<f64>,
}

fn check_word_ids(params: &TaggerParams, x: &[u32]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::EmptyInput("sentence".to_string()));
    }
    if let Some(&bad) = x.iter().find(|&&id| id as usize >= params.vocab_size()) {
        return Err(Error::Shape(alloc::format!(
            "word id {bad} >= vocabulary size {}",
            params.vocab_size()
        )));
    }
    Ok(())
}

/// Forward pass over one chunk with `n <= max_len`.
fn chunk_forward(params: &TaggerParams, config: &TaggerConfig, x: &[u32]) -> Result<ChunkForward> {
    let n = x.len();
    let max_len = config.max_len;
    debug_assert!(n >= 1 && n <= max_len);
    let d = config.embedding_dim;
    let k = config.cell_size;

    let mut mask = alloc::vec![false; max_len];
    let mut emb = Matrix::zeros(max_len, d);
    for (t, &id) in x.iter().enumerate() {
        mask[t] = true;
        emb.row_mut(t).copy_from_slice(params.embedding.row(id as usize));
    }

    let (h_fwd, cache_fwd) = lstm_layer_forward(&params.fwd, &emb, &mask, false)?;
    let (h_bwd, cache_bwd) = lstm_layer_forward(&params.bwd, &emb, &mask, true)?;

    let out = config.proj_out();
    let mut logits = alloc::vec![0.0; if config.positionwise_projection { out * n } else { out }];
    if config.positionwise_projection {
        for t in 0..n {
            let dst = &mut logits[t * out..(t + 1) * out];
            dst.copy_from_slice(params.proj_b.as_slice());
            for (j, &hv) in h_fwd.row(t).iter().enumerate() {
                if hv != 0.0 {
                    math::axpy(hv, params.proj_w.row(j), dst);
                }
            }
            for (j, &hv) in h_bwd.row(t).iter().enumerate() {
                if hv != 0.0 {
                    math::axpy(hv, params.proj_w.row(k + j), dst);
                }
            }
        }
    } else {
        logits.copy_from_slice(params.proj_b.as_slice());
        // Masked hidden rows are zero, so only rows t < n contribute.
        for t in 0..n {
            let base = t * 2 * k;
            for (j, &hv) in h_fwd.row(t).iter().enumerate() {
                if hv != 0.0 {
                    math::axpy(hv, params.proj_w.row(base + j), &mut logits);
                }
            }
            for (j, &hv) in h_bwd.row(t).iter().enumerate() {
                if hv != 0.0 {
                    math::axpy(hv, params.proj_w.row(base + k + j), &mut logits);
                }
            }
        }
    }

    Ok(ChunkForward {
        n,
        emb,
        h_fwd,
        h_bwd,
        cache_fwd,
        cache_bwd,
        logits,
    })
}

/// Logit slice for one (token, channel) cell of a chunk.
fn cell_logits<'a>(fwd: &'a ChunkForward, config: &TaggerConfig, t: usize, c: usize) -> &'a [f64] {
    let tags = config.tags;
    let base = if config.positionwise_projection {
        t * config.proj_out() + c * tags
    } else {
        (t * config.channels + c) * tags
    };
    &fwd.logits[base..base + tags]
}

fn chunk_probs(fwd: &ChunkForward, config: &TaggerConfig) -> TagProbs {
    let (c_num, tags) = (config.channels, config.tags);
    let mut data = Vec::with_capacity(fwd.n * c_num * tags);
    for t in 0..fwd.n {
        for c in 0..c_num {
            data.extend(crate::nnkernel::softmax(cell_logits(fwd, config, t, c)));
        }
    }
    TagProbs {
        n: fwd.n,
        channels: c_num,
        tags,
        data,
    }
}

/// Splits word indices into consecutive chunks of at most `max_len`.
fn chunks(x: &[u32], max_len: usize) -> impl Iterator<Item = &[u32]> {
    x.chunks(max_len)
}

/// Tag probabilities for a sentence of any length; every `(token, channel)`
/// slice is a point on the `T`-simplex. Longer sentences are processed as
/// consecutive `max_len` chunks.
pub fn forward(params: &TaggerParams, config: &TaggerConfig, x: &[u32]) -> Result<TagProbs> {
    check_word_ids(params, x)?;
    let mut result: Option<TagProbs> = None;
    for chunk in chunks(x, config.max_len) {
        let f = chunk_forward(params, config, chunk)?;
        let p = chunk_probs(&f, config);
        match result.as_mut() {
            Some(r) => r.append(p),
            None => result = Some(p),
        }
    }
    Ok(result.expect("non-empty input"))
}

/// Accumulates gradients for one chunk. `targets` is row-major `n x C`;
/// each cell's loss gradient is weighted by `cell_weight`. Returns the
/// summed (unweighted) cell losses.
fn chunk_backward(
    params: &TaggerParams,
    config: &TaggerConfig,
    fwd: &ChunkForward,
    x: &[u32],
    targets: &[usize],
    cell_weight: f64,
    grads: &mut TaggerParams,
    fine_tune: bool,
) -> Result<f64> {
    let n = fwd.n;
    let k = config.cell_size;
    let c_num = config.channels;

    let mut d_logits = alloc::vec![0.0; fwd.logits.len()];
    let mut loss_sum = 0.0;
    for t in 0..n {
        for c in 0..c_num {
            let target = targets[t * c_num + c];
            let (cell_loss, grad) = softmax_xent(cell_logits(fwd, config, t, c), target)?;
            loss_sum += cell_loss;
            let base = if config.positionwise_projection {
                t * config.proj_out() + c * config.tags
            } else {
                (t * c_num + c) * config.tags
            };
            for (offset, g) in grad.iter().enumerate() {
                d_logits[base + offset] = g * cell_weight;
            }
        }
    }

    // Projection backward.
    let mut d_h_fwd = Matrix::zeros(config.max_len, k);
    let mut d_h_bwd = Matrix::zeros(config.max_len, k);
    if config.positionwise_projection {
        let out = config.proj_out();
        for t in 0..n {
            let dl = &d_logits[t * out..(t + 1) * out];
            math::axpy(1.0, dl, grads.proj_b.as_mut_slice());
            for j in 0..k {
                let hf = fwd.h_fwd.get(t, j);
                if hf != 0.0 {
                    math::axpy(hf, dl, grads.proj_w.row_mut(j));
                }
                let hb = fwd.h_bwd.get(t, j);
                if hb != 0.0 {
                    math::axpy(hb, dl, grads.proj_w.row_mut(k + j));
                }
                d_h_fwd.set(t, j, math::dot(params.proj_w.row(j), dl));
                d_h_bwd.set(t, j, math::dot(params.proj_w.row(k + j), dl));
            }
        }
    } else {
        math::axpy(1.0, &d_logits, grads.proj_b.as_mut_slice());
        for t in 0..n {
            let base = t * 2 * k;
            for j in 0..k {
                let hf = fwd.h_fwd.get(t, j);
                if hf != 0.0 {
                    math::axpy(hf, &d_logits, grads.proj_w.row_mut(base + j));
                }
                let hb = fwd.h_bwd.get(t, j);
                if hb != 0.0 {
                    math::axpy(hb, &d_logits, grads.proj_w.row_mut(base + k + j));
                }
                d_h_fwd.set(t, j, math::dot(params.proj_w.row(base + j), &d_logits));
                d_h_bwd.set(t, j, math::dot(params.proj_w.row(base + k + j), &d_logits));
            }
        }
    }

    // LSTM backward, both directions, into the shared embedding gradient.
    let mut d_emb = Matrix::zeros(config.max_len, config.embedding_dim);
    lstm_layer_backward(
        &params.fwd,
        &fwd.emb,
        &fwd.h_fwd,
        &fwd.cache_fwd,
        &d_h_fwd,
        &mut grads.fwd,
        &mut d_emb,
    );
    lstm_layer_backward(
        &params.bwd,
        &fwd.emb,
        &fwd.h_bwd,
        &fwd.cache_bwd,
        &d_h_bwd,
        &mut grads.bwd,
        &mut d_emb,
    );
    if fine_tune {
        for (t, &id) in x.iter().enumerate() {
            math::axpy(1.0, d_emb.row(t), grads.embedding.row_mut(id as usize));
        }
    }
    Ok(loss_sum)
}

/// Mean categorical cross-entropy of the true tags over all `n x C` cells.
pub fn loss(params: &TaggerParams, config: &TaggerConfig, item: &TrainItem) -> Result<f64> {
    check_word_ids(params, item.word_ids.as_slice())?;
    if item.targets.len() != item.word_ids.len() * config.channels {
        return Err(Error::LengthMismatch {
            context: "targets vs n x C".to_string(),
            expected: item.word_ids.len() * config.channels,
            got: item.targets.len(),
        });
    }
    let mut total = 0.0;
    let mut offset = 0;
    for chunk in chunks(&item.word_ids, config.max_len) {
        let f = chunk_forward(params, config, chunk)?;
        for t in 0..f.n {
            for c in 0..config.channels {
                let target = item.targets[offset + t * config.channels + c];
                let (cell_loss, _) = softmax_xent(cell_logits(&f, config, t, c), target)?;
                total += cell_loss;
            }
        }
        offset += f.n * config.channels;
    }
    Ok(total / item.targets.len() as f64)
}

/// Mean cell loss together with the gradients of every trainable tensor
/// (embedding gradient included regardless of the fine-tune switch).
pub fn loss_and_grads(
    params: &TaggerParams,
    config: &TaggerConfig,
    item: &TrainItem,
) -> Result<(f64, TaggerParams)> {
    check_word_ids(params, item.word_ids.as_slice())?;
    let mut grads = params.zeros_like();
    let cells = item.targets.len() as f64;
    let mut total = 0.0;
    let mut offset = 0;
    for chunk in chunks(&item.word_ids, config.max_len) {
        let f = chunk_forward(params, config, chunk)?;
        let targets = &item.targets[offset * config.channels..];
        total += chunk_backward(
            params,
            config,
            &f,
            chunk,
            targets,
            1.0 / cells,
            &mut grads,
            true,
        )?;
        offset += chunk.len();
    }
    Ok((total / cells, grads))
}

/// Splits items longer than `max_len` into independent chunk items.
pub fn chunk_items(items: &[TrainItem], config: &TaggerConfig) -> Vec<TrainItem> {
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        if item.word_ids.len() <= config.max_len {
            out.push(item.clone());
            continue;
        }
        let c_num = config.channels;
        let mut offset = 0;
        for chunk in chunks(&item.word_ids, config.max_len) {
            out.push(TrainItem {
                word_ids: chunk.to_vec(),
                targets: item.targets[offset * c_num..(offset + chunk.len()) * c_num].to_vec(),
            });
            offset += chunk.len();
        }
    }
    out
}

/// Per-epoch mean training loss.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
}

/// Computes gradients over `batch` and applies one optimizer step.
/// Returns the mean of the per-item mean losses (pre-update).
pub(crate) fn train_batch(
    params: &mut TaggerParams,
    config: &TaggerConfig,
    batch: &[&TrainItem],
    grads: &mut TaggerParams,
    opt: &mut NesterovSgd,
) -> Result<f64> {
    for (_, g) in grads.tensors_mut() {
        g.fill(0.0);
    }
    let fine_tune = config.fine_tune_embeddings;
    let mut batch_loss = 0.0;
    for item in batch {
        let f = chunk_forward(params, config, &item.word_ids)?;
        let cells = item.targets.len() as f64;
        let cell_weight = 1.0 / (batch.len() as f64 * cells);
        let loss_sum = chunk_backward(
            params,
            config,
            &f,
            &item.word_ids,
            &item.targets,
            cell_weight,
            grads,
            fine_tune,
        )?;
        batch_loss += loss_sum / cells;
    }

    let mut p_tensors = params.tensors_mut();
    let g_tensors = grads.tensors();
    let mut p_step: Vec<(String, &mut Matrix)> = Vec::new();
    let mut g_step: Vec<(String, &Matrix)> = Vec::new();
    for ((pn, p), (gn, g)) in p_tensors.drain(..).zip(g_tensors) {
        if !fine_tune && pn == "embedding" {
            continue;
        }
        p_step.push((pn, p));
        g_step.push((gn, g));
    }
    opt.step(&mut p_step, &g_step)?;
    Ok(batch_loss / batch.len() as f64)
}

/// Trains the tagger in place.
///
/// Epoch order is shuffled with the seeded RNG; gradient accumulation order
/// inside a batch is fixed, so a given seed yields identical parameters.
/// With `fine_tune_embeddings = false` the embedding matrix is excluded from
/// the update (and from the clipped gradient norm) and stays bit-identical.
pub fn train(
    params: &mut TaggerParams,
    config: &TaggerConfig,
    items: &[TrainItem],
) -> Result<TrainReport> {
    config.validate()?;
    if items.is_empty() {
        return Err(Error::EmptyInput("training set".to_string()));
    }
    for item in items {
        check_word_ids(params, &item.word_ids)?;
        if item.targets.len() != item.word_ids.len() * config.channels {
            return Err(Error::LengthMismatch {
                context: "targets vs n x C".to_string(),
                expected: item.word_ids.len() * config.channels,
                got: item.targets.len(),
            });
        }
        if let Some(&bad) = item.targets.iter().find(|&&t| t >= config.tags) {
            return Err(Error::TargetOutOfRange {
                target: bad,
                num_tags: config.tags,
            });
        }
    }
    let items = chunk_items(items, config);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut opt = NesterovSgd::new(config.learning_rate, config.momentum, config.clip_norm)?;
    let mut grads = params.zeros_like();
    let mut order: Vec<usize> = (0..items.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch_ids in order.chunks(config.batch_size) {
            let batch: Vec<&TrainItem> = batch_ids.iter().map(|&i| &items[i]).collect();
            epoch_loss +=
                train_batch(params, config, &batch, &mut grads, &mut opt)? * batch.len() as f64;
        }
        let mean = epoch_loss / items.len() as f64;
        if !mean.is_finite() {
            return Err(Error::NonFiniteLoss(alloc::format!(
                "tagger training, epoch {epoch}"
            )));
        }
        epoch_losses.push(mean);
    }
    Ok(TrainReport { epoch_losses })
}

/// Preference order for argmax ties: `O` wins, then `S`, `B`, `I`, `E`.
const TIE_ORDER: [Tag; NUM_TAGS] = [Tag::Outside, Tag::Single, Tag::Begin, Tag::Inside, Tag::End];

/// Decodes per-cell argmax tags (no structured decoding).
pub fn predict_tags(params: &TaggerParams, config: &TaggerConfig, x: &[u32]) -> Result<TagGrid> {
    if config.channels != NUM_CHANNELS || config.tags != NUM_TAGS {
        return Err(Error::InvalidConfig(
            "predict_tags needs the 5-channel, 5-tag configuration".to_string(),
        ));
    }
    let probs = forward(params, config, x)?;
    let mut grid = TagGrid::new(probs.n_tokens());
    for t in 0..probs.n_tokens() {
        for c in 0..NUM_CHANNELS {
            let cell = probs.cell(t, c);
            let mut best = TIE_ORDER[0];
            let mut best_p = cell[best.index()];
            for &tag in &TIE_ORDER[1..] {
                if cell[tag.index()] > best_p {
                    best = tag;
                    best_p = cell[tag.index()];
                }
            }
            grid.set(t, c, best);
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Tag;

    fn small_config() -> TaggerConfig {
        TaggerConfig {
            embedding_dim: 3,
            cell_size: 4,
            max_len: 5,
            epochs: 1,
            batch_size: 2,
            learning_rate: 0.1,
            seed: 11,
            ..TaggerConfig::default()
        }
    }

    fn init(config: &TaggerConfig, vocab: usize) -> TaggerParams {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let emb = Matrix::uniform(vocab, config.embedding_dim, -0.01, 0.01, &mut rng);
        TaggerParams::init(config, emb, &mut rng).unwrap()
    }

    #[test]
    fn output_slices_are_simplex_points() {
        let config = small_config();
        let params = init(&config, 7);
        for n in 1..=5u32 {
            let x: Vec<u32> = (0..n).map(|i| i % 7).collect();
            let probs = forward(&params, &config, &x).unwrap();
            assert_eq!(probs.n_tokens(), n as usize);
            for t in 0..probs.n_tokens() {
                for c in 0..5 {
                    let cell = probs.cell(t, c);
                    let sum: f64 = cell.iter().sum();
                    assert!((sum - 1.0).abs() < 1e-6);
                    assert!(cell.iter().all(|&p| p >= 0.0));
                }
            }
        }
    }

    #[test]
    fn near_zero_init_gives_near_uniform_probabilities() {
        let config = small_config();
        let params = init(&config, 7);
        let probs = forward(&params, &config, &[0, 1, 2]).unwrap();
        for t in 0..3 {
            for c in 0..5 {
                for &p in probs.cell(t, c) {
                    assert!((0.1..=0.4).contains(&p), "p = {p}");
                }
            }
        }
    }

    #[test]
    fn forward_is_pure() {
        let config = small_config();
        let params = init(&config, 7);
        let a = forward(&params, &config, &[1, 2, 3]).unwrap();
        let b = forward(&params, &config, &[1, 2, 3]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn long_inputs_are_chunked() {
        let config = small_config();
        let params = init(&config, 7);
        let x: Vec<u32> = (0..12).map(|i| i % 7).collect();
        let probs = forward(&params, &config, &x).unwrap();
        assert_eq!(probs.n_tokens(), 12);
        // First chunk of a long input equals the standalone 5-token pass.
        let head = forward(&params, &config, &x[..5]).unwrap();
        for t in 0..5 {
            for c in 0..5 {
                assert_eq!(probs.cell(t, c), head.cell(t, c));
            }
        }
    }

    #[test]
    fn empty_and_out_of_range_inputs_error() {
        let config = small_config();
        let params = init(&config, 7);
        assert!(forward(&params, &config, &[]).is_err());
        assert!(forward(&params, &config, &[7]).is_err());
    }

    #[test]
    fn loss_of_uniform_predictions_is_ln_5() {
        let config = small_config();
        let mut params = init(&config, 7);
        // Zero LSTM + zero projection => exactly uniform probabilities.
        params.fwd = params.fwd.zeros_like();
        params.bwd = params.bwd.zeros_like();
        params.proj_w.fill(0.0);
        params.proj_b.fill(0.0);
        let grid = TagGrid::new(3);
        let item = TrainItem::from_grid(alloc::vec![0, 1, 2], &grid).unwrap();
        let l = loss(&params, &config, &item).unwrap();
        assert!((l - (5.0f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn perfect_one_hot_predictions_have_zero_loss() {
        let config = small_config();
        let mut params = init(&config, 7);
        params.fwd = params.fwd.zeros_like();
        params.bwd = params.bwd.zeros_like();
        params.proj_w.fill(0.0);
        params.proj_b.fill(0.0);
        // Bias the Outside logit sky-high in every cell: p(O) ~ 1.
        for t in 0..config.max_len {
            for c in 0..config.channels {
                let base = (t * config.channels + c) * config.tags;
                params.proj_b.as_mut_slice()[base + Tag::Outside.index()] = 500.0;
            }
        }
        let grid = TagGrid::new(3);
        let item = TrainItem::from_grid(alloc::vec![0, 1, 2], &grid).unwrap();
        let l = loss(&params, &config, &item).unwrap();
        assert!(l.abs() < 1e-12);
    }

    #[test]
    fn frozen_embeddings_stay_bit_identical() {
        let mut config = small_config();
        config.fine_tune_embeddings = false;
        config.epochs = 3;
        let mut params = init(&config, 7);
        let before = params.embedding.clone();
        let mut grid = TagGrid::new(3);
        grid.set(0, 1, Tag::Single);
        let items = [
            TrainItem::from_grid(alloc::vec![0, 1, 2], &grid).unwrap(),
            TrainItem::from_grid(alloc::vec![3, 4, 5], &grid).unwrap(),
        ];
        train(&mut params, &config, &items).unwrap();
        assert_eq!(params.embedding, before);
        // And the rest of the network did move.
        assert_ne!(params.proj_b, params.proj_b.zeros_like());
    }

    #[test]
    fn same_seed_trains_identical_parameters() {
        let config = small_config();
        let mut grid = TagGrid::new(2);
        grid.set(1, 0, Tag::Single);
        let items = [
            TrainItem::from_grid(alloc::vec![0, 1], &grid).unwrap(),
            TrainItem::from_grid(alloc::vec![2, 3], &grid).unwrap(),
            TrainItem::from_grid(alloc::vec![4, 5], &grid).unwrap(),
        ];
        let mut a = init(&config, 7);
        let mut b = init(&config, 7);
        train(&mut a, &config, &items).unwrap();
        train(&mut b, &config, &items).unwrap();
        for ((na, ta), (_, tb)) in a.tensors().into_iter().zip(b.tensors()) {
            assert_eq!(ta, tb, "tensor {na}");
        }
    }

    #[test]
    fn empty_training_set_is_an_error() {
        let config = small_config();
        let mut params = init(&config, 7);
        assert!(matches!(
            train(&mut params, &config, &[]),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn forced_one_hot_probabilities_recover_the_grid() {
        let config = small_config();
        let mut params = init(&config, 7);
        params.fwd = params.fwd.zeros_like();
        params.bwd = params.bwd.zeros_like();
        params.proj_w.fill(0.0);
        params.proj_b.fill(0.0);
        // Want: token 0 -> B in channel 1, token 2 -> E in channel 1.
        let mut want = TagGrid::new(3);
        want.set(0, 1, Tag::Begin);
        want.set(2, 1, Tag::End);
        for t in 0..3 {
            for c in 0..5 {
                let base = (t * config.channels + c) * config.tags;
                params.proj_b.as_mut_slice()[base + want.get(t, c).index()] = 500.0;
            }
        }
        let got = predict_tags(&params, &config, &[0, 1, 2]).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn all_tags_tied_prefer_outside() {
        let config = small_config();
        let mut params = init(&config, 7);
        params.fwd = params.fwd.zeros_like();
        params.bwd = params.bwd.zeros_like();
        params.proj_w.fill(0.0);
        params.proj_b.fill(0.0);
        let grid = predict_tags(&params, &config, &[0, 1, 2, 3]).unwrap();
        for t in 0..4 {
            for c in 0..5 {
                assert_eq!(grid.get(t, c), Tag::Outside);
            }
        }
    }

    #[test]
    fn output_shape_is_always_n_by_5_by_5() {
        let config = TaggerConfig {
            embedding_dim: 4,
            cell_size: 3,
            max_len: 40,
            ..TaggerConfig::default()
        };
        let params = init(&config, 9);
        for n in [1usize, 2, 17, 39, 40] {
            let x: Vec<u32> = (0..n).map(|i| (i % 9) as u32).collect();
            let probs = forward(&params, &config, &x).unwrap();
            assert_eq!(
                (probs.n_tokens(), probs.channels(), probs.tags()),
                (n, 5, 5)
            );
        }
    }
}
