//! Scalar and slice math helpers.
//!
//! Transcendentals are routed through `libm` unconditionally so the numeric
//! results are identical with and without the `std` feature.

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + exp(-x))
}

/// `ys += alpha * xs`, the inner loop of every matrix product here.
pub(crate) fn axpy(alpha: f64, xs: &[f64], ys: &mut [f64]) {
    debug_assert_eq!(xs.len(), ys.len());
    for (y, x) in ys.iter_mut().zip(xs) {
        *y += alpha * x;
    }
}

pub(crate) fn dot(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    xs.iter().zip(ys).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_midpoint() {
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn axpy_accumulates() {
        let mut ys = [1.0, 2.0];
        axpy(2.0, &[3.0, 4.0], &mut ys);
        assert_eq!(ys, [7.0, 10.0]);
    }
}
