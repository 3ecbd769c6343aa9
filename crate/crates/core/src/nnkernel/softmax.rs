use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Numerically stabilized softmax (max subtraction).
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&l| math::exp(l - max)).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= sum);
    out
}

/// Cross-entropy of one categorical cell.
///
/// Returns `(-ln softmax(logits)[target], softmax(logits) - onehot(target))`.
pub fn softmax_xent(logits: &[f64], target: usize) -> Result<(f64, Vec<f64>)> {
    if logits.len() < 2 {
        return Err(Error::Shape(alloc::format!(
            "softmax_xent needs at least 2 logits, got {}",
            logits.len()
        )));
    }
    if target >= logits.len() {
        return Err(Error::TargetOutOfRange {
            target,
            num_tags: logits.len(),
        });
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|&l| math::exp(l - max)).sum();
    let loss = math::ln(sum) - (logits[target] - max);
    let mut grad = softmax(logits);
    grad[target] -= 1.0;
    Ok((loss, grad))
}
