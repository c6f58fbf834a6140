//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex;

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and eigenvectors (as columns) of a Hermitian matrix.
pub fn hermitian_eigen<T: Real>(a: &DenseMatrix<T>) -> Result<(Vec<T>, DenseMatrix<T>)> {
    if !a.is_square() {
        return Err(Error::size("eigendecomposition needs a square matrix"));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut v = DenseMatrix::identity(n);
    let scale = a.as_slice().iter().fold(T::zero(), |s, x| s.max(x.norm())).max(T::min_positive_value());
    let tol = T::epsilon() * scale * T::lit(1e-2);

    for _ in 0..MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .fold(T::zero(), |s, (p, q)| s.max(m[(p, q)].norm()));
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

// Zeroes m[p][q] with J = D R on the (p, q) plane, where D removes the phase of
// m[p][q] and R is the real Jacobi rotation of the resulting symmetric block.
fn rotate<T: Real>(m: &mut DenseMatrix<T>, v: &mut DenseMatrix<T>, p: usize, q: usize) {
    let b = m[(p, q)];
    let abs = b.norm();
    if abs == T::zero() {
        return;
    }
    let phase = b / abs;
    let (a, d) = (m[(p, p)].re, m[(q, q)].re);
    let theta = T::lit(0.5) * (T::lit(2.0) * abs).atan2(a - d);
    let (s, c) = theta.sin_cos();
    let zero = T::zero();
    // J = [[c, -s], [s·conj(phase), c·conj(phase)]]
    let j00 = Complex::new(c, zero);
    let j01 = Complex::new(-s, zero);
    let j10 = phase.conj() * s;
    let j11 = phase.conj() * c;
    let n = m.rows();
    for r in 0..n {
        let (x, y) = (m[(r, p)], m[(r, q)]);
        m[(r, p)] = x * j00 + y * j10;
        m[(r, q)] = x * j01 + y * j11;
        let (x, y) = (v[(r, p)], v[(r, q)]);
        v[(r, p)] = x * j00 + y * j10;
        v[(r, q)] = x * j01 + y * j11;
    }
    for col in 0..n {
        let (x, y) = (m[(p, col)], m[(q, col)]);
        m[(p, col)] = j00.conj() * x + j10.conj() * y;
        m[(q, col)] = j01.conj() * x + j11.conj() * y;
    }
    m[(p, q)] = Complex::new(zero, zero);
    m[(q, p)] = Complex::new(zero, zero);
}

/// `f(A)` for Hermitian `A`, applied through the eigenvalues.
pub fn hermitian_function<T: Real>(a: &DenseMatrix<T>, f: impl Fn(T) -> T) -> Result<DenseMatrix<T>> {
    let (values, vectors) = hermitian_eigen(a)?;
    let mapped: Vec<T> = values.into_iter().map(f).collect();
    vectors.matmul(&DenseMatrix::diagonal(&mapped))?.matmul(&vectors.adjoint())
}
