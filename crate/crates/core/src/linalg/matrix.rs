use std::fmt;
use std::ops::Mul;

use rand::Rng;

use super::Field;
use crate::error::{Error, Result};

/// Dense row-major matrix over GF(p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Output of [`Matrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from residues that are already reduced mod p.
    pub fn from_vec(field: Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "from_vec",
                left: rows * cols,
                right: data.len(),
            });
        }
        let p = field.prime();
        let data = data.into_iter().map(|x| x % p).collect();
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from signed integer rows, reducing every entry mod p.
    /// `cols` is needed so that a matrix with zero rows keeps its width.
    pub fn from_rows(field: Field, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    op: "from_rows",
                    left: cols,
                    right: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| field.reduce(x)));
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// A single column vector.
    pub fn column(field: Field, entries: &[i64]) -> Self {
        Matrix {
            field,
            rows: entries.len(),
            cols: 1,
            data: entries.iter().map(|&x| field.reduce(x)).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Self {
        let p = field.prime();
        let data = (0..rows * cols).map(|_| rng.gen_range(0..p)).collect();
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Rejection-samples an invertible `n × n` matrix.
    pub fn random_invertible<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field, n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: u32) {
        self.data[r * self.cols + c] = value % self.field.prime();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.row_iter().map(<[u32]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn try_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch {
                left: self.field.prime(),
                right: rhs.field.prime(),
            });
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                op: "matrix product",
                left: self.cols,
                right: rhs.rows,
            });
        }
        let p = self.field.prime() as u64;
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        // Accumulate in u64 and reduce lazily; p < 2^31 so p^2 < 2^62 and
        // we can add a few products before overflow.
        let mut acc = vec![0u64; rhs.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (slot, &b) in acc.iter_mut().zip(rhs_row) {
                    *slot = (*slot + a * b as u64) % p;
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                out.data[r * rhs.cols + c] = v as u32;
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                op: "matrix sum",
                left: self.rows * self.cols,
                right: rhs.rows * rhs.cols,
            });
        }
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Matrix {
            data,
            ..self.clone()
        })
    }

    pub fn neg(&self) -> Matrix {
        let f = self.field;
        Matrix {
            data: self.data.iter().map(|&a| f.neg(a)).collect(),
            ..self.clone()
        }
    }

    /// Stacks `self` on top of `other` (same column count).
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                op: "vstack",
                left: self.cols,
                right: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Places `self` to the left of `other` (same row count).
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                op: "hstack",
                left: self.rows,
                right: other.rows,
            });
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        out.write_block(0, 0, self);
        out.write_block(self.rows, self.cols, other);
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn write_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(r));
        }
    }

    /// Rows `range` as a new matrix.
    pub fn select_rows(&self, rows: impl IntoIterator<Item = usize>) -> Matrix {
        let mut data = Vec::new();
        let mut n = 0;
        for r in rows {
            data.extend_from_slice(self.row(r));
            n += 1;
        }
        Matrix {
            field: self.field,
            rows: n,
            cols: self.cols,
            data,
        }
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        Rref {
            rank: pivots.len(),
            reduced: m,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.clone().rref_in_place().len()
    }

    /// Gauss-Jordan elimination; returns pivot columns in increasing order.
    pub(crate) fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field;
        let p = f.prime() as u64;
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..cols {
                    self.data.swap(pr * cols + k, r * cols + k);
                }
            }
            let inv = f.inv_nonzero(self.data[r * cols + c]) as u64;
            for k in c..cols {
                let v = &mut self.data[r * cols + k];
                *v = (*v as u64 * inv % p) as u32;
            }
            let (before, rest) = self.data.split_at_mut(r * cols);
            let (pivot_row, after) = rest.split_at_mut(cols);
            let eliminate = |row: &mut [u32]| {
                let factor = row[c] as u64;
                if factor == 0 {
                    return;
                }
                let neg = p - factor;
                for k in c..cols {
                    row[k] = ((row[k] as u64 + neg * pivot_row[k] as u64) % p) as u32;
                }
            };
            before.chunks_mut(cols).for_each(eliminate);
            after.chunks_mut(cols).for_each(eliminate);
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(self.field, n)).ok()?;
        let Rref {
            reduced, pivots, ..
        } = aug.rref();
        // Invertible iff the left half reduces to the identity.
        if pivots.iter().take_while(|&&c| c < n).count() < n {
            return None;
        }
        let mut inv = Matrix::zeros(self.field, n, n);
        for r in 0..n {
            inv.data[r * n..(r + 1) * n].copy_from_slice(&reduced.row(r)[n..]);
        }
        Some(inv)
    }

    /// Some `x` with `self · x = rhs`, free variables set to zero; `None` if
    /// the system is inconsistent.
    pub fn solve(&self, rhs: &Matrix) -> Option<Matrix> {
        if rhs.rows != self.rows {
            return None;
        }
        let n = self.cols;
        let k = rhs.cols;
        let Rref {
            reduced, pivots, ..
        } = self.hstack(rhs).ok()?.rref();
        if pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut x = Matrix::zeros(self.field, n, k);
        for (r, &c) in pivots.iter().enumerate() {
            x.data[c * k..(c + 1) * k].copy_from_slice(&reduced.row(r)[n..]);
        }
        Some(x)
    }

    /// `self · v` for a column vector given as a slice.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.field.prime() as u64;
        self.row_iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p)
                    as u32
            })
            .collect()
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    /// Panics on shape mismatch; use [`Matrix::try_mul`] for a checked product.
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Matrix<GF({})>{}x{}{:?}",
            self.field.prime(),
            self.rows,
            self.cols,
            self.to_rows()
        )
    }
}
