//! Central-difference gradient checker.
//!
//! The loss closure sees the parameter tensors as a plain slice so any model
//! can be checked: callers snapshot their tensors into a `Vec<Matrix>`,
//! rebuild the model inside the closure, and compare against hand-derived
//! gradients. All checking runs in 64-bit.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::Matrix;

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Per-tensor maximum relative error between analytic and numeric gradients.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub per_tensor: Vec<(String, f64)>,
}

impl GradCheckReport {
    pub fn max_rel_error(&self) -> f64 {
        self.per_tensor
            .iter()
            .map(|&(_, e)| e)
            .fold(0.0, f64::max)
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.max_rel_error() < tolerance
    }
}

/// Compares `analytic` gradients against central finite differences of
/// `loss` with step `step`, perturbing one parameter at a time.
///
/// Relative error per element is `|a - n| / max(|a| + |n|, 1e-6)`.
pub fn grad_check<F>(
    tensors: &mut Vec<Matrix>,
    names: &[&str],
    analytic: &[Matrix],
    mut loss: F,
    step: f64,
) -> GradCheckReport
where
    F: FnMut(&[Matrix]) -> f64,
{
    assert_eq!(tensors.len(), names.len());
    assert_eq!(tensors.len(), analytic.len());
    let mut per_tensor = Vec::with_capacity(tensors.len());
    for ti in 0..tensors.len() {
        assert_eq!(
            tensors[ti].shape(),
            analytic[ti].shape(),
            "analytic gradient shape for `{}`",
            names[ti]
        );
        let mut worst = 0.0f64;
        for idx in 0..tensors[ti].len() {
            let saved = tensors[ti].as_slice()[idx];
            tensors[ti].as_mut_slice()[idx] = saved + step;
            let up = loss(tensors);
            tensors[ti].as_mut_slice()[idx] = saved - step;
            let down = loss(tensors);
            tensors[ti].as_mut_slice()[idx] = saved;
            let numeric = (up - down) / (2.0 * step);
            let a = analytic[ti].as_slice()[idx];
            let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        }
        per_tensor.push((names[ti].to_string(), worst));
    }
    GradCheckReport { per_tensor }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_form_is_exact() {
        // f(p) = sum c_j p_j^2 with analytic gradient 2 c_j p_j.
        let coef = [0.5, -1.5, 2.0];
        let mut tensors = alloc::vec![Matrix::from_vec(1, 3, alloc::vec![0.3, -0.7, 1.1]).unwrap()];
        let analytic = alloc::vec![Matrix::from_vec(
            1,
            3,
            tensors[0]
                .as_slice()
                .iter()
                .zip(coef)
                .map(|(&p, c)| 2.0 * c * p)
                .collect(),
        )
        .unwrap()];
        let report = grad_check(
            &mut tensors,
            &["p"],
            &analytic,
            |ts| {
                ts[0]
                    .as_slice()
                    .iter()
                    .zip(coef)
                    .map(|(&p, c)| c * p * p)
                    .sum()
            },
            FD_STEP,
        );
        assert!(report.max_rel_error() < 1e-8, "{report:?}");
    }

    #[test]
    fn corrupted_gradient_is_detected() {
        let mut tensors = alloc::vec![Matrix::from_vec(1, 2, alloc::vec![0.4, -0.2]).unwrap()];
        let mut bad = Matrix::from_vec(1, 2, alloc::vec![0.8, -0.4]).unwrap();
        bad.set(0, 1, -0.9); // true gradient is -0.4
        let report = grad_check(
            &mut tensors,
            &["p"],
            &alloc::vec![bad],
            |ts| ts[0].sq_norm(),
            FD_STEP,
        );
        assert!(report.max_rel_error() > 1e-4);
    }
}
