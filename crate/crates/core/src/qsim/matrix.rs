use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex<T>) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        DenseMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::size("ragged matrix rows"));
        }
        Ok(DenseMatrix { rows: r, cols: c, data: rows.concat() })
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
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

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::size(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o = *o + a * *b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.cols {
            return Err(Error::size(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + *a * *b))
            .collect())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| *x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::size("matrix shapes differ"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect();
        Ok(DenseMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self[(i, i)])
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.rows != other.rows || self.cols != other.cols {
            return T::infinity();
        }
        self.data.iter().zip(&other.data).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `‖U†U - I‖_max ≤ tol`.
    pub fn is_isometry(&self, tol: T) -> bool {
        match self.adjoint().matmul(self) {
            Ok(g) => g.max_abs_diff(&Self::identity(self.cols)) <= tol,
            Err(_) => false,
        }
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.is_square() && self.is_isometry(tol)
    }

    /// `P² = P` and `P† = P`.
    pub fn is_projector(&self, tol: T) -> bool {
        self.is_hermitian(tol) && self.matmul(self).map(|sq| sq.max_abs_diff(self) <= tol).unwrap_or(false)
    }

    /// Distance to `other` up to a global phase: `min_θ ‖self - e^{iθ} other‖_max`,
    /// with θ taken from the phase of `Tr(other† self)`.
    pub fn phase_distance(&self, other: &Self) -> T {
        let overlap = other
            .data
            .iter()
            .zip(&self.data)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (b, a)| acc + b.conj() * *a);
        let phase = if overlap.norm() > T::zero() { overlap / overlap.norm() } else { Complex::new(T::one(), T::zero()) };
        self.max_abs_diff(&other.scale(phase))
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = DenseMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn kron_and_matmul_agree_on_small_case() {
        let x = M::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]).unwrap();
        let i2 = M::identity(2);
        let xi = x.kron(&i2);
        assert_eq!(xi[(0, 2)], c(1., 0.));
        assert_eq!(xi[(1, 3)], c(1., 0.));
        assert!(xi.matmul(&xi).unwrap().max_abs_diff(&M::identity(4)) < 1e-15);
        assert!(xi.is_unitary(1e-12));
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let u = M::from_rows(&[vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(0., 1.)]]).unwrap();
        let w = u.scale(c(0., 1.));
        assert!(u.phase_distance(&w) < 1e-15);
        assert!(u.max_abs_diff(&w) > 0.5);
    }

    #[test]
    fn shape_errors() {
        assert!(M::zeros(2, 3).matmul(&M::zeros(2, 3)).is_err());
        assert!(M::from_rows(&[vec![c(1., 0.)], vec![]]).is_err());
    }
}
