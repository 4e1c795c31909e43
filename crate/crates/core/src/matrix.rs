//! Dense matrices over any scalar with `+`, `*`, `0` and `1`.

use std::fmt::Debug;
use std::ops::{AddAssign, Mul};

use num_traits::{One, Zero};

/// Scalars the matrix code can multiply: exact rationals, big counts, floats.
pub trait Scalar: Clone + Zero + One + PartialEq + Debug {
    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self);
}

impl<T> Scalar for T
where
    T: Clone + Zero + One + PartialEq + Debug + for<'a> AddAssign<&'a T>,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += &(a * b);
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let data = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        Matrix { rows, cols, data }
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.data.iter().enumerate().map(move |(k, x)| (k / self.cols, k % self.cols, x))
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().fold(T::zero(), |mut acc, x| {
                    acc.add_product(x, &T::one());
                    acc
                })
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out: Matrix<T> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j].add_product(a, b);
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows, "dimension mismatch");
        let mut out = vec![T::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (j, x) in self.row(i).iter().enumerate() {
                out[j].add_product(vi, x);
            }
        }
        out
    }

    /// `self^k` by repeated squaring; `k = 0` gives the identity.
    pub fn pow(&self, mut k: u64) -> Matrix<T> {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut result = Matrix::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn map<U: Scalar>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Count, Exact};
    use proptest::prelude::*;

    #[test]
    fn identity_and_power_zero() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(m.pow(0), Matrix::identity(2));
        assert_eq!(m.pow(1), m);
        assert_eq!(m.pow(2), Matrix::from_rows(vec![vec![7.0, 10.0], vec![15.0, 22.0]]));
    }

    #[test]
    fn fibonacci_in_counts() {
        let m: Matrix<Count> = Matrix::from_rows(vec![vec![1u32.into(), 1u32.into()], vec![1u32.into(), 0u32.into()]]);
        let p = m.pow(100);
        assert_eq!(p.get(0, 1).to_string(), "354224848179261915075");
    }

    #[test]
    fn exact_rows_and_vectors() {
        let half = Exact::new(1.into(), 2.into());
        let m = Matrix::from_rows(vec![vec![half.clone(), half.clone()], vec![Exact::one(), Exact::zero()]]);
        assert_eq!(m.row_sums(), vec![Exact::one(), Exact::one()]);
        let v = m.left_mul_vec(&[Exact::new(2.into(), 3.into()), Exact::new(1.into(), 3.into())]);
        assert_eq!(v, vec![Exact::new(2.into(), 3.into()), Exact::new(1.into(), 3.into())]);
    }

    proptest! {
        #[test]
        fn squaring_matches_repeated_product(entries in proptest::collection::vec(0u32..4, 9), k in 0u64..12) {
            let m: Matrix<Count> = Matrix::from_fn(3, 3, |i, j| Count::from(entries[i * 3 + j]));
            let mut naive = Matrix::identity(3);
            for _ in 0..k {
                naive = naive.mul(&m);
            }
            prop_assert_eq!(m.pow(k), naive);
        }
    }
}
