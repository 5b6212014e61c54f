//! Dense row-major matrices over a [`FiniteField`].

use std::fmt;

use super::field::{Fe, FiniteField};
use super::MathError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Fe::ONE)
    }

    pub fn scalar(n: usize, c: Fe) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Fe>>) -> Result<Self, MathError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MathError::Shape("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, cols: &[Vec<Fe>]) -> Result<Self, MathError> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != rows {
                return Err(MathError::Shape(format!("column {j} has length {}, expected {rows}", col.len())));
            }
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, f: &FiniteField, other: &Matrix) -> Result<Matrix, MathError> {
        if self.cols != other.rows {
            return Err(MathError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, f.mul(a, other.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, f: &FiniteField, v: &[Fe]) -> Result<Vec<Fe>, MathError> {
        if v.len() != self.cols {
            return Err(MathError::Shape("vector length mismatch".into()));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(Fe::ZERO, |acc, j| f.add(acc, f.mul(self.get(i, j), v[j]))))
            .collect())
    }

    pub fn add(&self, f: &FiniteField, other: &Matrix) -> Result<Matrix, MathError> {
        self.zip(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, f: &FiniteField, other: &Matrix) -> Result<Matrix, MathError> {
        self.zip(other, |a, b| f.sub(a, b))
    }

    fn zip(&self, other: &Matrix, op: impl Fn(Fe, Fe) -> Fe) -> Result<Matrix, MathError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MathError::Shape("dimension mismatch".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    /// `self - c I`.
    pub fn sub_scalar(&self, f: &FiniteField, c: Fe) -> Result<Matrix, MathError> {
        if !self.is_square() {
            return Err(MathError::Shape("matrix is not square".into()));
        }
        let mut m = self.clone();
        for i in 0..self.rows {
            m.set(i, i, f.sub(m.get(i, i), c));
        }
        Ok(m)
    }

    pub fn pow(&self, f: &FiniteField, mut e: u64) -> Result<Matrix, MathError> {
        if !self.is_square() {
            return Err(MathError::Shape("matrix is not square".into()));
        }
        let mut acc = Matrix::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { Fe::ONE } else { Fe::ZERO }))
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self, f: &FiniteField) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, piv);
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            for j in col..m.cols {
                m.set(row, j, f.mul(m.get(row, j), inv));
            }
            for i in 0..m.rows {
                if i == row {
                    continue;
                }
                let factor = m.get(i, col);
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(row, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self, f: &FiniteField) -> usize {
        self.rref(f).1.len()
    }

    pub fn nullity(&self, f: &FiniteField) -> usize {
        self.cols - self.rank(f)
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn nullspace(&self, f: &FiniteField) -> Vec<Vec<Fe>> {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Fe::ZERO; self.cols];
                v[fc] = Fe::ONE;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(row, fc));
                }
                v
            })
            .collect()
    }

    /// Some solution of `self * x = b`.
    pub fn solve(&self, f: &FiniteField, b: &[Fe]) -> Result<Vec<Fe>, MathError> {
        if b.len() != self.rows {
            return Err(MathError::Shape("right-hand side length mismatch".into()));
        }
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let (r, pivots) = aug.rref(f);
        if pivots.last() == Some(&self.cols) {
            return Err(MathError::Inconsistent);
        }
        let mut x = vec![Fe::ZERO; self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols);
        }
        Ok(x)
    }

    pub fn inverse(&self, f: &FiniteField) -> Result<Matrix, MathError> {
        if !self.is_square() {
            return Err(MathError::Shape("matrix is not square".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, Fe::ONE);
        }
        let (r, pivots) = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(MathError::Singular);
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Ok(inv)
    }

    /// `P^-1 self P` for an invertible `P`.
    pub fn conjugate(&self, f: &FiniteField, p: &Matrix) -> Result<Matrix, MathError> {
        p.inverse(f)?.mul(f, self)?.mul(f, p)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(out, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}
