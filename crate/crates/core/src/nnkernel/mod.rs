//! Minimal dense numeric kernel.
//!
//! Just enough machinery to train the sequence models in this crate:
//! row-major [`Matrix`], a peephole LSTM cell with hand-derived backward
//! pass, softmax with cross-entropy, SGD with Nesterov momentum, AdaGrad,
//! global-norm gradient clipping, and a central-difference gradient checker.
//! No graph compiler, no general autodiff.

mod gradcheck;
mod lstm;
mod matrix;
mod optim;
mod softmax;

pub use gradcheck::{grad_check, GradCheckReport, FD_STEP};
pub use lstm::{
    lstm_cell_step, lstm_layer_backward, lstm_layer_forward, LstmCellParams, LstmLayerCache,
    GATE_CANDIDATE, GATE_FORGET, GATE_INPUT, GATE_OUTPUT,
};
pub use matrix::Matrix;
pub use optim::{adagrad_update, clip_scale, global_grad_norm, AdaGrad, NesterovSgd};
pub use softmax::{softmax, softmax_xent};
