use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math;

/// Dense row-major f64 matrix. Vectors are rows (`1 x n`).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: alloc::vec![0.0; rows * cols],
        }
    }

    /// A `1 x len` row vector of zeros.
    pub fn vector(len: usize) -> Matrix {
        Matrix::zeros(1, len)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::Shape(alloc::format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Entries drawn uniformly, strictly inside the open interval `(lo, hi)`.
    pub fn uniform<R: Rng>(rows: usize, cols: usize, lo: f64, hi: f64, rng: &mut R) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for v in &mut m.data {
            *v = loop {
                let x = rng.gen_range(lo..hi);
                if x != lo && x != hi {
                    break x;
                }
            };
        }
        m
    }

    /// Glorot/Xavier uniform initialization over `(-b, b)`,
    /// `b = sqrt(6 / (fan_in + fan_out))`.
    pub fn xavier<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
        let bound = math::sqrt(6.0 / (rows + cols) as f64);
        Matrix::uniform(rows, cols, -bound, bound, rng)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    pub fn zeros_like(&self) -> Matrix {
        Matrix::zeros(self.rows, self.cols)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Sum of squared entries.
    pub fn sq_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub(crate) fn shape_check(&self, other: &Matrix, what: &str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(shape_msg(what, self.shape(), other.shape())));
        }
        Ok(())
    }
}

fn shape_msg(what: &str, a: (usize, usize), b: (usize, usize)) -> String {
    alloc::format!("{what}: {}x{} vs {}x{}", a.0, a.1, b.0, b.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn row_access_is_row_major() {
        let m = Matrix::from_vec(2, 3, alloc::vec![1., 2., 3., 4., 5., 6.]).unwrap();
        assert_eq!(m.row(1), [4., 5., 6.]);
        assert_eq!(m.get(0, 2), 3.0);
    }

    #[test]
    fn from_vec_rejects_bad_length() {
        assert!(Matrix::from_vec(2, 2, alloc::vec![1.0]).is_err());
    }

    #[test]
    fn uniform_strictly_inside_open_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = Matrix::uniform(40, 25, -0.01, 0.01, &mut rng);
        assert!(m.as_slice().iter().all(|&v| v > -0.01 && v < 0.01));
    }

    #[test]
    fn seeded_init_is_deterministic() {
        let a = Matrix::xavier(5, 4, &mut ChaCha8Rng::seed_from_u64(3));
        let b = Matrix::xavier(5, 4, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }
}
