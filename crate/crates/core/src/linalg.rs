//! Dense exact linear algebra over an arbitrary [`Scalar`] field.
//!
//! Everything here is deterministic: pivots are chosen positionally (first
//! nonzero in row-major scan order), never by magnitude, and free variables
//! in underdetermined solves are pinned to zero. Rational determinants go
//! through fraction-free Bareiss elimination on the cleared-denominator
//! integer matrix, with the correction factor tracked exactly.

use crate::error::{Error, Result};
use crate::scalar::{Rat, Ring, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Index, IndexMut};

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type QMatrix = Matrix<Rat>;

impl<T: Ring> Matrix<T> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
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

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<T> {
        self.row(i).to_vec()
    }

    pub fn push_row(&mut self, row: Vec<T>) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out: Matrix<T> = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let t = out[(i, j)].clone() + a.clone() * b.clone();
                    out[(i, j)] = t;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() * s.clone()
        })
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    if self[(i, j)].is_zero() || v[j].is_zero() {
                        continue;
                    }
                    acc = acc + self[(i, j)].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        let mut acc = T::zero();
        for i in 0..self.rows {
            acc = acc + self[(i, i)].clone();
        }
        acc
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }
}

impl<T: Scalar> Matrix<T> {
    /// Reduce to reduced row echelon form in place. Returns the pivot
    /// columns. Pivot choice is the first row with a nonzero entry in the
    /// current column, scanning top to bottom.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(r * self.cols + j, pr * self.cols + j);
                }
            }
            let inv = T::one() / self[(r, c)].clone();
            for j in c..self.cols {
                let t = self[(r, j)].clone() * inv.clone();
                self[(r, j)] = t;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    let t = self[(i, j)].clone() - f.clone() * self[(r, j)].clone();
                    self[(i, j)] = t;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Canonical basis of the row space: the nonzero rows of the reduced
    /// row echelon form. Two matrices have equal row spaces iff these agree.
    pub fn row_space_basis(&self) -> Vec<Vec<T>> {
        let mut m = self.clone();
        let pivots = m.rref();
        (0..pivots.len()).map(|i| m.row_vec(i)).collect()
    }

    /// Basis of the null space, canonicalized per [`Scalar`].
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = Some(i);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = T::zero() - m[(i, free)].clone();
            }
            T::canonicalize_vector(&mut v);
            basis.push(v);
        }
        basis
    }

    /// Basis of the column space: canonical row-space basis of the
    /// transpose, canonicalized per [`Scalar`].
    pub fn image_basis(&self) -> Vec<Vec<T>> {
        let mut basis = self.transpose().row_space_basis();
        for v in &mut basis {
            T::canonicalize_vector(v);
        }
        basis
    }

    /// One exact solution of `self * x = b`, or `None` if inconsistent.
    /// Free variables are pinned to zero.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = aug[(i, self.cols)].clone();
        }
        Some(x)
    }

    /// Determinant by plain exact elimination, valid over any field.
    pub fn det_field(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(T::zero());
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(c * n + j, pr * n + j);
                }
                det = T::zero() - det;
            }
            det = det * m[(c, c)].clone();
            let inv = T::one() / m[(c, c)].clone();
            for i in (c + 1)..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone() * inv.clone();
                for j in c..n {
                    let t = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    m[(i, j)] = t;
                }
            }
        }
        Ok(det)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.data[i * self.cols + j].to_string())
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Exact rank, kernel basis and image basis in one call.
pub fn rank_kernel_image<T: Scalar>(m: &Matrix<T>) -> (usize, Vec<Vec<T>>, Vec<Vec<T>>) {
    let kernel = m.kernel_basis();
    let image = m.image_basis();
    let rank = image.len();
    debug_assert_eq!(rank + kernel.len(), m.cols());
    (rank, kernel, image)
}

impl Matrix<Rat> {
    /// Exact rational determinant.
    ///
    /// Rows are cleared to integers first, then reduced by fraction-free
    /// Bareiss elimination; the row factors are divided back out at the end.
    pub fn det(&self) -> Result<Rat> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Rat::one());
        }
        let mut correction = BigInt::one();
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut lcm = BigInt::one();
            for j in 0..n {
                lcm = lcm.lcm(self[(i, j)].denom());
            }
            m.push(
                (0..n)
                    .map(|j| self[(i, j)].numer() * (&lcm / self[(i, j)].denom()))
                    .collect(),
            );
            correction *= lcm;
        }

        let mut sign = 1i64;
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                let Some(sw) = ((k + 1)..n).find(|&i| !m[i][k].is_zero()) else {
                    return Ok(Rat::zero());
                };
                m.swap(k, sw);
                sign = -sign;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let t = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                    m[i][j] = t;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let det_int = m[n - 1][n - 1].clone() * BigInt::from(sign);
        Ok(Rat::new(det_int, correction))
    }
}

/// The unique squarefree integer `d` with `r / d` a square in `Q^x`,
/// computed by trial division of `numerator * denominator` up to `bound`.
///
/// Fails loudly when an unfactored cofactor survives past the bound; a
/// silently wrong square class is never returned.
pub fn squarefree_part(r: &Rat, bound: u64) -> Result<BigInt> {
    if r.is_zero() {
        return Err(Error::ZeroSquareClass);
    }
    let m = r.numer() * r.denom();
    let negative = m.is_negative();
    let mut n = m.abs();
    let mut out = BigInt::one();
    let mut d: u64 = 2;
    loop {
        let dd = BigInt::from(d) * BigInt::from(d);
        if dd > n {
            break;
        }
        if d > bound {
            return Err(Error::FactorBoundExceeded {
                cofactor: n.to_string(),
                bound,
            });
        }
        let div = BigInt::from(d);
        let mut exp = 0u32;
        while (&n % &div).is_zero() {
            n /= &div;
            exp += 1;
        }
        if exp % 2 == 1 {
            out *= &div;
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if n > BigInt::one() {
        // no divisor up to sqrt(n), so the cofactor is prime
        out *= n;
    }
    if negative {
        out = -out;
    }
    Ok(out)
}
