//! Peephole LSTM cell and masked bidirectional-capable layer.
//!
//! Gate equations (peephole form; the peephole terms drop out when the cell
//! is built with `peepholes = false`):
//!
//! ```text
//! i = sigmoid(x W_xi + h' W_hi + w_ci * c' + b_i)
//! f = sigmoid(x W_xf + h' W_hf + w_cf * c' + b_f)
//! g = tanh   (x W_xc + h' W_hc            + b_c)
//! c = f * c' + i * g
//! o = sigmoid(x W_xo + h' W_ho + w_co * c + b_o)
//! h = o * tanh(c)
//! ```
//!
//! The backward pass is hand-derived; the gradient checker validates it.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math;

use super::Matrix;

pub const GATE_INPUT: usize = 0;
pub const GATE_FORGET: usize = 1;
pub const GATE_CANDIDATE: usize = 2;
pub const GATE_OUTPUT: usize = 3;

const GATE_NAMES: [&str; 4] = ["i", "f", "c", "o"];

/// All trainable tensors of one LSTM cell.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmCellParams {
    input_size: usize,
    cell_size: usize,
    peepholes: bool,
    /// Input weights, `d x k`, gate order `[i, f, c, o]`.
    pub w_x: [Matrix; 4],
    /// Recurrent weights, `k x k`.
    pub w_h: [Matrix; 4],
    /// Peephole vectors, `1 x k`, order `[i, f, o]`.
    pub w_c: [Matrix; 3],
    /// Biases, `1 x k`.
    pub b: [Matrix; 4],
}

impl LstmCellParams {
    /// Xavier-initialized weights; forget-gate bias 1.0, other biases and
    /// peepholes 0.
    pub fn init<R: Rng>(input_size: usize, cell_size: usize, peepholes: bool, rng: &mut R) -> Self {
        let w_x = core::array::from_fn(|_| Matrix::xavier(input_size, cell_size, rng));
        let w_h = core::array::from_fn(|_| Matrix::xavier(cell_size, cell_size, rng));
        let w_c = core::array::from_fn(|_| Matrix::vector(cell_size));
        let mut b: [Matrix; 4] = core::array::from_fn(|_| Matrix::vector(cell_size));
        b[GATE_FORGET].fill(1.0);
        LstmCellParams {
            input_size,
            cell_size,
            peepholes,
            w_x,
            w_h,
            w_c,
            b,
        }
    }

    pub fn zeros(input_size: usize, cell_size: usize, peepholes: bool) -> Self {
        LstmCellParams {
            input_size,
            cell_size,
            peepholes,
            w_x: core::array::from_fn(|_| Matrix::zeros(input_size, cell_size)),
            w_h: core::array::from_fn(|_| Matrix::zeros(cell_size, cell_size)),
            w_c: core::array::from_fn(|_| Matrix::vector(cell_size)),
            b: core::array::from_fn(|_| Matrix::vector(cell_size)),
        }
    }

    pub fn zeros_like(&self) -> Self {
        LstmCellParams::zeros(self.input_size, self.cell_size, self.peepholes)
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn cell_size(&self) -> usize {
        self.cell_size
    }

    pub fn peepholes(&self) -> bool {
        self.peepholes
    }

    /// Named views over all tensors, in a fixed order used by optimizers and
    /// checkpoints. Names are prefixed: `{prefix}w_xi`, `{prefix}w_hf`, ...
    pub fn tensors(&self, prefix: &str) -> Vec<(alloc::string::String, &Matrix)> {
        let mut out = Vec::with_capacity(15);
        for gate in 0..4 {
            out.push((
                alloc::format!("{prefix}w_x{}", GATE_NAMES[gate]),
                &self.w_x[gate],
            ));
        }
        for gate in 0..4 {
            out.push((
                alloc::format!("{prefix}w_h{}", GATE_NAMES[gate]),
                &self.w_h[gate],
            ));
        }
        for (idx, name) in ["i", "f", "o"].iter().enumerate() {
            out.push((alloc::format!("{prefix}w_c{name}"), &self.w_c[idx]));
        }
        for gate in 0..4 {
            out.push((alloc::format!("{prefix}b_{}", GATE_NAMES[gate]), &self.b[gate]));
        }
        out
    }

    pub fn tensors_mut(&mut self, prefix: &str) -> Vec<(alloc::string::String, &mut Matrix)> {
        let mut out: Vec<(alloc::string::String, &mut Matrix)> = Vec::with_capacity(15);
        let LstmCellParams { w_x, w_h, w_c, b, .. } = self;
        for (gate, m) in w_x.iter_mut().enumerate() {
            out.push((alloc::format!("{prefix}w_x{}", GATE_NAMES[gate]), m));
        }
        for (gate, m) in w_h.iter_mut().enumerate() {
            out.push((alloc::format!("{prefix}w_h{}", GATE_NAMES[gate]), m));
        }
        for (idx, m) in w_c.iter_mut().enumerate() {
            let name = ["i", "f", "o"][idx];
            out.push((alloc::format!("{prefix}w_c{name}"), m));
        }
        for (gate, m) in b.iter_mut().enumerate() {
            out.push((alloc::format!("{prefix}b_{}", GATE_NAMES[gate]), m));
        }
        out
    }
}

/// One cell step: returns `(h, c)`.
pub fn lstm_cell_step(
    params: &LstmCellParams,
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (d, k) = (params.input_size, params.cell_size);
    if x.len() != d || h_prev.len() != k || c_prev.len() != k {
        return Err(Error::Shape(alloc::format!(
            "lstm_cell_step: x {} (want {d}), h {} / c {} (want {k})",
            x.len(),
            h_prev.len(),
            c_prev.len()
        )));
    }
    let mut gates = StepGates::new(k);
    step_into(params, x, h_prev, c_prev, &mut gates);
    Ok((gates.h, gates.c))
}

/// Intermediate values of one step, cached for the backward pass.
struct StepGates {
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    c: Vec<f64>,
    tanh_c: Vec<f64>,
    h: Vec<f64>,
}

impl StepGates {
    fn new(k: usize) -> StepGates {
        StepGates {
            i: alloc::vec![0.0; k],
            f: alloc::vec![0.0; k],
            g: alloc::vec![0.0; k],
            o: alloc::vec![0.0; k],
            c: alloc::vec![0.0; k],
            tanh_c: alloc::vec![0.0; k],
            h: alloc::vec![0.0; k],
        }
    }
}

fn preact(params: &LstmCellParams, gate: usize, x: &[f64], h_prev: &[f64], out: &mut [f64]) {
    out.copy_from_slice(params.b[gate].as_slice());
    for (r, &xv) in x.iter().enumerate() {
        if xv != 0.0 {
            math::axpy(xv, params.w_x[gate].row(r), out);
        }
    }
    for (r, &hv) in h_prev.iter().enumerate() {
        if hv != 0.0 {
            math::axpy(hv, params.w_h[gate].row(r), out);
        }
    }
}

fn step_into(
    params: &LstmCellParams,
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    gates: &mut StepGates,
) {
    let k = params.cell_size;
    preact(params, GATE_INPUT, x, h_prev, &mut gates.i);
    preact(params, GATE_FORGET, x, h_prev, &mut gates.f);
    preact(params, GATE_CANDIDATE, x, h_prev, &mut gates.g);
    preact(params, GATE_OUTPUT, x, h_prev, &mut gates.o);
    if params.peepholes {
        let (ci, cf) = (params.w_c[0].as_slice(), params.w_c[1].as_slice());
        for j in 0..k {
            gates.i[j] += ci[j] * c_prev[j];
            gates.f[j] += cf[j] * c_prev[j];
        }
    }
    for j in 0..k {
        gates.i[j] = math::sigmoid(gates.i[j]);
        gates.f[j] = math::sigmoid(gates.f[j]);
        gates.g[j] = math::tanh(gates.g[j]);
        gates.c[j] = gates.f[j] * c_prev[j] + gates.i[j] * gates.g[j];
    }
    if params.peepholes {
        let co = params.w_c[2].as_slice();
        for j in 0..k {
            gates.o[j] += co[j] * gates.c[j];
        }
    }
    for j in 0..k {
        gates.o[j] = math::sigmoid(gates.o[j]);
        gates.tanh_c[j] = math::tanh(gates.c[j]);
        gates.h[j] = gates.o[j] * gates.tanh_c[j];
    }
}

/// Per-sequence cache produced by [`lstm_layer_forward`].
pub struct LstmLayerCache {
    /// Positions actually processed, in processing order.
    processed: Vec<usize>,
    // n x k matrices; rows only valid at processed positions.
    gate_i: Matrix,
    gate_f: Matrix,
    gate_g: Matrix,
    gate_o: Matrix,
    cell: Matrix,
    tanh_c: Matrix,
}

/// Runs the cell over a sequence.
///
/// `inputs` is `n x d`; the returned `H` is `n x k`, rows aligned to original
/// positions regardless of direction. Masked-out steps copy the state through
/// unchanged and leave their output row at zero, so `H` is independent of the
/// input values at masked positions. `reverse` iterates back-to-front.
pub fn lstm_layer_forward(
    params: &LstmCellParams,
    inputs: &Matrix,
    mask: &[bool],
    reverse: bool,
) -> Result<(Matrix, LstmLayerCache)> {
    let n = inputs.rows();
    if inputs.cols() != params.input_size {
        return Err(Error::Shape(alloc::format!(
            "lstm_layer_forward: input width {} != d {}",
            inputs.cols(),
            params.input_size
        )));
    }
    if mask.len() != n {
        return Err(Error::LengthMismatch {
            context: alloc::string::String::from("lstm_layer_forward mask"),
            expected: n,
            got: mask.len(),
        });
    }
    let k = params.cell_size;
    let mut hidden = Matrix::zeros(n, k);
    let mut cache = LstmLayerCache {
        processed: Vec::new(),
        gate_i: Matrix::zeros(n, k),
        gate_f: Matrix::zeros(n, k),
        gate_g: Matrix::zeros(n, k),
        gate_o: Matrix::zeros(n, k),
        cell: Matrix::zeros(n, k),
        tanh_c: Matrix::zeros(n, k),
    };

    let mut h = alloc::vec![0.0; k];
    let mut c = alloc::vec![0.0; k];
    let mut gates = StepGates::new(k);
    for step in 0..n {
        let t = if reverse { n - 1 - step } else { step };
        if !mask[t] {
            continue;
        }
        step_into(params, inputs.row(t), &h, &c, &mut gates);
        cache.gate_i.row_mut(t).copy_from_slice(&gates.i);
        cache.gate_f.row_mut(t).copy_from_slice(&gates.f);
        cache.gate_g.row_mut(t).copy_from_slice(&gates.g);
        cache.gate_o.row_mut(t).copy_from_slice(&gates.o);
        cache.cell.row_mut(t).copy_from_slice(&gates.c);
        cache.tanh_c.row_mut(t).copy_from_slice(&gates.tanh_c);
        hidden.row_mut(t).copy_from_slice(&gates.h);
        h.copy_from_slice(&gates.h);
        c.copy_from_slice(&gates.c);
        cache.processed.push(t);
    }
    Ok((hidden, cache))
}

/// Backpropagates `d_hidden` (gradient w.r.t. `H`) through the layer,
/// accumulating parameter gradients into `grads` and input gradients into
/// `d_inputs`. Rows of `d_hidden` at masked positions are ignored.
pub fn lstm_layer_backward(
    params: &LstmCellParams,
    inputs: &Matrix,
    hidden: &Matrix,
    cache: &LstmLayerCache,
    d_hidden: &Matrix,
    grads: &mut LstmCellParams,
    d_inputs: &mut Matrix,
) {
    let k = params.cell_size;
    let mut dh_rec = alloc::vec![0.0; k];
    let mut dc_rec = alloc::vec![0.0; k];
    let mut da = [
        alloc::vec![0.0; k],
        alloc::vec![0.0; k],
        alloc::vec![0.0; k],
        alloc::vec![0.0; k],
    ];

    for (pos, &t) in cache.processed.iter().enumerate().rev() {
        // State entering this step: the output of the previously processed
        // step, or zeros at the start of the sequence.
        let (h_prev, c_prev): (&[f64], &[f64]) = if pos == 0 {
            (&[], &[])
        } else {
            let prev_t = cache.processed[pos - 1];
            (hidden.row(prev_t), cache.cell.row(prev_t))
        };

        let (i, f, g, o) = (
            cache.gate_i.row(t),
            cache.gate_f.row(t),
            cache.gate_g.row(t),
            cache.gate_o.row(t),
        );
        let (c, tc) = (cache.cell.row(t), cache.tanh_c.row(t));

        for j in 0..k {
            let dh = d_hidden.get(t, j) + dh_rec[j];
            let do_ = dh * tc[j];
            let da_o = do_ * o[j] * (1.0 - o[j]);
            let mut dc = dc_rec[j] + dh * o[j] * (1.0 - tc[j] * tc[j]);
            if params.peepholes {
                dc += da_o * params.w_c[2].as_slice()[j];
            }
            let cp = if pos == 0 { 0.0 } else { c_prev[j] };
            let da_i = dc * g[j] * i[j] * (1.0 - i[j]);
            let da_f = dc * cp * f[j] * (1.0 - f[j]);
            let da_g = dc * i[j] * (1.0 - g[j] * g[j]);
            da[GATE_INPUT][j] = da_i;
            da[GATE_FORGET][j] = da_f;
            da[GATE_CANDIDATE][j] = da_g;
            da[GATE_OUTPUT][j] = da_o;
            if params.peepholes {
                grads.w_c[0].as_mut_slice()[j] += da_i * cp;
                grads.w_c[1].as_mut_slice()[j] += da_f * cp;
                grads.w_c[2].as_mut_slice()[j] += da_o * c[j];
                dc_rec[j] = dc * f[j]
                    + da_i * params.w_c[0].as_slice()[j]
                    + da_f * params.w_c[1].as_slice()[j];
            } else {
                dc_rec[j] = dc * f[j];
            }
        }

        let x = inputs.row(t);
        for gate in 0..4 {
            math::axpy(1.0, &da[gate], grads.b[gate].as_mut_slice());
            for (r, &xv) in x.iter().enumerate() {
                if xv != 0.0 {
                    math::axpy(xv, &da[gate], grads.w_x[gate].row_mut(r));
                }
            }
            if pos > 0 {
                for (r, &hv) in h_prev.iter().enumerate() {
                    if hv != 0.0 {
                        math::axpy(hv, &da[gate], grads.w_h[gate].row_mut(r));
                    }
                }
            }
        }
        let dx = d_inputs.row_mut(t);
        for (r, dxv) in dx.iter_mut().enumerate() {
            let mut acc = 0.0;
            for gate in 0..4 {
                acc += math::dot(params.w_x[gate].row(r), &da[gate]);
            }
            *dxv += acc;
        }
        for j in 0..k {
            let mut acc = 0.0;
            for gate in 0..4 {
                acc += math::dot(params.w_h[gate].row(j), &da[gate]);
            }
            dh_rec[j] = acc;
        }
        // dh_rec/dc_rec now address the previously processed step; at pos 0
        // they fall off the sequence start and are dropped.
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_params_fixed_point() {
        let params = LstmCellParams::zeros(3, 2, true);
        let (h, c) = lstm_cell_step(&params, &[1.0, -2.0, 0.5], &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        // i = 0.5, g = tanh(0) = 0, so c = 0 and h = 0.5 * tanh(0) = 0.
        assert_eq!(h, [0.0, 0.0]);
        assert_eq!(c, [0.0, 0.0]);
    }

    #[test]
    fn scalar_hand_trace() {
        // d = k = 1 with hand-set weights; expected values from a calculator
        // trace of the gate equations.
        let mut p = LstmCellParams::zeros(1, 1, true);
        p.w_x[GATE_INPUT].set(0, 0, 0.5);
        p.w_h[GATE_INPUT].set(0, 0, 0.25);
        p.w_c[0].set(0, 0, 0.1);
        p.b[GATE_INPUT].set(0, 0, 0.05);
        p.w_x[GATE_FORGET].set(0, 0, -0.3);
        p.w_h[GATE_FORGET].set(0, 0, 0.2);
        p.w_c[1].set(0, 0, -0.15);
        p.b[GATE_FORGET].set(0, 0, 1.0);
        p.w_x[GATE_CANDIDATE].set(0, 0, 0.7);
        p.w_h[GATE_CANDIDATE].set(0, 0, -0.4);
        p.w_x[GATE_OUTPUT].set(0, 0, 0.6);
        p.w_h[GATE_OUTPUT].set(0, 0, 0.3);
        p.w_c[2].set(0, 0, 0.2);
        p.b[GATE_OUTPUT].set(0, 0, -0.1);

        let (h, c) = lstm_cell_step(&p, &[1.0], &[0.5], &[-0.25]).unwrap();
        assert!((c[0] - 0.12913120079873835).abs() < 1e-12);
        assert!((h[0] - 0.0851164254524631).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let params = LstmCellParams::zeros(3, 2, true);
        assert!(lstm_cell_step(&params, &[1.0], &[0.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn all_masked_layer_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = LstmCellParams::init(3, 4, true, &mut rng);
        let inputs = Matrix::xavier(5, 3, &mut rng);
        let (h, cache) = lstm_layer_forward(&params, &inputs, &[false; 5], false).unwrap();
        assert!(h.as_slice().iter().all(|&v| v == 0.0));
        assert!(cache.processed.is_empty());
    }

    #[test]
    fn single_step_layer_equals_cell_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let params = LstmCellParams::init(3, 4, true, &mut rng);
        let inputs = Matrix::xavier(1, 3, &mut rng);
        let (h, _) = lstm_layer_forward(&params, &inputs, &[true], false).unwrap();
        let (h_cell, _) =
            lstm_cell_step(&params, inputs.row(0), &[0.0; 4], &[0.0; 4]).unwrap();
        assert_eq!(h.row(0), h_cell.as_slice());
    }

    #[test]
    fn reverse_of_palindrome_is_reversed_forward() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = LstmCellParams::init(2, 3, true, &mut rng);
        let mut inputs = Matrix::zeros(5, 2);
        for (t, row) in [[0.3, -0.1], [0.5, 0.2], [0.9, 0.0], [0.5, 0.2], [0.3, -0.1]]
            .iter()
            .enumerate()
        {
            inputs.row_mut(t).copy_from_slice(row);
        }
        let (fwd, _) = lstm_layer_forward(&params, &inputs, &[true; 5], false).unwrap();
        let (bwd, _) = lstm_layer_forward(&params, &inputs, &[true; 5], true).unwrap();
        for t in 0..5 {
            for j in 0..3 {
                assert!((fwd.get(t, j) - bwd.get(4 - t, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn masked_positions_do_not_influence_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let params = LstmCellParams::init(2, 3, true, &mut rng);
        let mask = [true, false, true, false, true];
        let mut a = Matrix::xavier(5, 2, &mut rng);
        let (ha, _) = lstm_layer_forward(&params, &a, &mask, false).unwrap();
        // Scramble the masked rows.
        a.row_mut(1).copy_from_slice(&[99.0, -99.0]);
        a.row_mut(3).copy_from_slice(&[-7.0, 7.0]);
        let (hb, _) = lstm_layer_forward(&params, &a, &mask, false).unwrap();
        assert_eq!(ha, hb);
        assert!(ha.row(1).iter().all(|&v| v == 0.0));
    }
}
