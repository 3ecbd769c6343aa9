//! Optimizers: SGD with Nesterov momentum (used by the sequence taggers) and
//! AdaGrad (used by the co-occurrence embedding trainers).
//!
//! Both operate on named tensor lists so any parameter struct can expose its
//! tensors in a fixed order and share the update/clipping logic.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

use super::Matrix;

/// Global L2 norm across all gradient tensors; errors on non-finite values,
/// naming the offending tensor.
pub fn global_grad_norm(grads: &[(String, &Matrix)]) -> Result<f64> {
    let mut sq = 0.0;
    for (name, g) in grads {
        if !g.all_finite() {
            return Err(Error::NonFiniteGradient(name.clone()));
        }
        sq += g.sq_norm();
    }
    Ok(math::sqrt(sq))
}

/// Scale factor that clips a gradient of norm `norm` to `clip_norm`.
/// Clipping preserves direction: the result is always a positive multiple.
pub fn clip_scale(norm: f64, clip_norm: f64) -> f64 {
    if norm > clip_norm && norm > 0.0 {
        clip_norm / norm
    } else {
        1.0
    }
}

/// SGD with Nesterov momentum and global-norm gradient clipping.
///
/// With the clipped gradient `g`:
///
/// ```text
/// v <- mu * v - lr * g
/// theta <- theta + mu * v - lr * g     (v already updated)
/// ```
///
/// `momentum = 0` reduces to plain SGD.
#[derive(Debug, Clone)]
pub struct NesterovSgd {
    pub learning_rate: f64,
    pub momentum: f64,
    pub clip_norm: f64,
    velocity: Vec<(String, Matrix)>,
}

impl NesterovSgd {
    pub fn new(learning_rate: f64, momentum: f64, clip_norm: f64) -> Result<NesterovSgd> {
        if learning_rate <= 0.0 {
            return Err(Error::InvalidConfig("learning_rate must be > 0".to_string()));
        }
        if !(0.0..1.0).contains(&momentum) {
            return Err(Error::InvalidConfig("momentum must be in [0, 1)".to_string()));
        }
        if clip_norm <= 0.0 {
            return Err(Error::InvalidConfig("clip_norm must be > 0".to_string()));
        }
        Ok(NesterovSgd {
            learning_rate,
            momentum,
            clip_norm,
            velocity: Vec::new(),
        })
    }

    /// Applies one update. Tensors are matched to velocity slots by position;
    /// the first call fixes names and shapes.
    pub fn step(
        &mut self,
        params: &mut [(String, &mut Matrix)],
        grads: &[(String, &Matrix)],
    ) -> Result<()> {
        if params.len() != grads.len() {
            return Err(Error::LengthMismatch {
                context: "optimizer params vs grads".to_string(),
                expected: params.len(),
                got: grads.len(),
            });
        }
        if self.velocity.is_empty() {
            self.velocity = params
                .iter()
                .map(|(name, m)| (name.clone(), m.zeros_like()))
                .collect();
        }
        let scale = {
            let norm = global_grad_norm(grads)?;
            clip_scale(norm, self.clip_norm)
        };
        let (mu, lr) = (self.momentum, self.learning_rate);
        for (slot, ((name, param), (gname, grad))) in
            self.velocity.iter_mut().zip(params.iter_mut().zip(grads))
        {
            debug_assert_eq!(name, gname);
            debug_assert_eq!(&slot.0, name);
            param.shape_check(grad, name)?;
            param.shape_check(&slot.1, name)?;
            let v = slot.1.as_mut_slice();
            let p = param.as_mut_slice();
            for ((pv, vv), gv) in p.iter_mut().zip(v.iter_mut()).zip(grad.as_slice()) {
                let g = scale * gv;
                *vv = mu * *vv - lr * g;
                *pv += mu * *vv - lr * g;
            }
        }
        Ok(())
    }
}

/// The AdaGrad update rule for a single parameter, shared between the dense
/// optimizer below and the sparse per-row updates in the GloVe trainer.
#[inline]
pub fn adagrad_update(param: &mut f64, accum: &mut f64, grad: f64, lr: f64, eps: f64) {
    *accum += grad * grad;
    *param -= lr * grad / (math::sqrt(*accum) + eps);
}

/// Dense AdaGrad: `acc += g^2; theta -= lr * g / (sqrt(acc) + eps)`.
#[derive(Debug, Clone)]
pub struct AdaGrad {
    pub learning_rate: f64,
    pub epsilon: f64,
    accum: Vec<(String, Matrix)>,
}

impl AdaGrad {
    pub fn new(learning_rate: f64, epsilon: f64) -> Result<AdaGrad> {
        if learning_rate <= 0.0 {
            return Err(Error::InvalidConfig("learning_rate must be > 0".to_string()));
        }
        if epsilon < 0.0 {
            return Err(Error::InvalidConfig("epsilon must be >= 0".to_string()));
        }
        Ok(AdaGrad {
            learning_rate,
            epsilon,
            accum: Vec::new(),
        })
    }

    pub fn step(
        &mut self,
        params: &mut [(String, &mut Matrix)],
        grads: &[(String, &Matrix)],
    ) -> Result<()> {
        if params.len() != grads.len() {
            return Err(Error::LengthMismatch {
                context: "optimizer params vs grads".to_string(),
                expected: params.len(),
                got: grads.len(),
            });
        }
        if self.accum.is_empty() {
            self.accum = params
                .iter()
                .map(|(name, m)| (name.clone(), m.zeros_like()))
                .collect();
        }
        for (slot, ((name, param), (gname, grad))) in
            self.accum.iter_mut().zip(params.iter_mut().zip(grads))
        {
            debug_assert_eq!(name, gname);
            if !grad.all_finite() {
                return Err(Error::NonFiniteGradient(gname.clone()));
            }
            param.shape_check(grad, name)?;
            let acc = slot.1.as_mut_slice();
            let p = param.as_mut_slice();
            for ((pv, av), gv) in p.iter_mut().zip(acc.iter_mut()).zip(grad.as_slice()) {
                adagrad_update(pv, av, *gv, self.learning_rate, self.epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(name: &str, values: &[f64]) -> (String, Matrix) {
        (
            name.to_string(),
            Matrix::from_vec(1, values.len(), values.to_vec()).unwrap(),
        )
    }

    #[test]
    fn zero_momentum_is_plain_sgd() {
        let mut opt = NesterovSgd::new(0.1, 0.0, 1e9).unwrap();
        let (name, mut p) = single("p", &[1.0, -2.0]);
        let (_, g) = single("p", &[0.5, 1.0]);
        opt.step(&mut [(name.clone(), &mut p)], &[(name, &g)]).unwrap();
        assert_eq!(p.as_slice(), [1.0 - 0.05, -2.0 - 0.1]);
    }

    #[test]
    fn two_steps_on_quadratic_hand_trace() {
        // f(theta) = theta^2, grad = 2 theta, lr 0.1, mu 0.9, from theta = 1:
        // v1 = -0.2,   theta1 = 1 - 0.18 - 0.2      = 0.62
        // v2 = -0.304, theta2 = 0.62 - 0.2736 - 0.124 = 0.2224
        let mut opt = NesterovSgd::new(0.1, 0.9, 1e9).unwrap();
        let (name, mut p) = single("p", &[1.0]);
        for expected in [0.62, 0.2224] {
            let g = Matrix::from_vec(1, 1, alloc::vec![2.0 * p.get(0, 0)]).unwrap();
            opt.step(&mut [(name.clone(), &mut p)], &[(name.clone(), &g)])
                .unwrap();
            assert!((p.get(0, 0) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn clipping_halves_an_oversized_gradient() {
        // ||g|| = 10, clip_norm = 5: update must use g/2.
        let mut opt = NesterovSgd::new(1.0, 0.0, 5.0).unwrap();
        let (name, mut p) = single("p", &[0.0, 0.0]);
        let (_, g) = single("p", &[6.0, 8.0]);
        opt.step(&mut [(name.clone(), &mut p)], &[(name, &g)]).unwrap();
        assert_eq!(p.as_slice(), [-3.0, -4.0]);
    }

    #[test]
    fn clipping_preserves_direction() {
        let (_, g) = single("g", &[3.0, -4.0]);
        let norm = global_grad_norm(&[("g".to_string(), &g)]).unwrap();
        assert!((norm - 5.0).abs() < 1e-12);
        let s = clip_scale(norm, 2.0);
        assert!(s > 0.0 && (s - 0.4).abs() < 1e-12);
        assert_eq!(clip_scale(1.0, 2.0), 1.0);
    }

    #[test]
    fn non_finite_gradient_names_the_tensor() {
        let mut opt = NesterovSgd::new(0.1, 0.9, 5.0).unwrap();
        let (name, mut p) = single("embedding", &[1.0]);
        let (_, g) = single("embedding", &[f64::NAN]);
        let err = opt
            .step(&mut [(name.clone(), &mut p)], &[(name, &g)])
            .unwrap_err();
        assert_eq!(err, Error::NonFiniteGradient("embedding".to_string()));
    }

    #[test]
    fn adagrad_first_step_magnitude() {
        // sqrt(acc) = |g| after the first step, so the move is ~lr * sign(g).
        let mut opt = AdaGrad::new(0.5, 1e-12).unwrap();
        let (name, mut p) = single("p", &[0.0, 0.0]);
        let (_, g) = single("p", &[4.0, -0.25]);
        opt.step(&mut [(name.clone(), &mut p)], &[(name, &g)]).unwrap();
        assert!((p.get(0, 0) + 0.5).abs() < 1e-9);
        assert!((p.get(0, 1) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn adagrad_constant_gradient_decays_as_inverse_sqrt_t() {
        let mut opt = AdaGrad::new(1.0, 0.0).unwrap();
        let (name, mut p) = single("p", &[0.0]);
        let (_, g) = single("p", &[3.0]);
        let mut prev = 0.0;
        for t in 1..=5 {
            let before = p.get(0, 0);
            opt.step(&mut [(name.clone(), &mut p)], &[(name.clone(), &g)])
                .unwrap();
            let step = before - p.get(0, 0);
            let expected = 1.0 / (t as f64).sqrt();
            assert!((step - expected).abs() < 1e-12);
            assert!(t == 1 || step < prev);
            prev = step;
        }
    }

    #[test]
    fn adagrad_zero_gradient_is_a_no_op() {
        let mut opt = AdaGrad::new(0.5, 1e-8).unwrap();
        let (name, mut p) = single("p", &[1.25]);
        let (_, g) = single("p", &[0.0]);
        opt.step(&mut [(name.clone(), &mut p)], &[(name, &g)]).unwrap();
        assert_eq!(p.get(0, 0), 1.25);
    }
}
