//! Symmetric sparse storage, real or complex.
//!
//! Only the upper triangle (`row <= col`) is stored, column by column with
//! sorted row indices. Complex matrices here are complex *symmetric*
//! (`A^T = A`), never Hermitian, so the lower triangle is the plain mirror.

use std::fmt::{Debug, LowerExp};
use std::io::Write;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use faer::traits::ComplexField;
use faer::Mat;
use num_complex::Complex64;

use crate::Error;

/// Field operations shared by the real and complex solver paths.
pub trait Scalar:
    ComplexField
    + Copy
    + Send
    + Sync
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    const IS_COMPLEX: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn from_complex(z: Complex64) -> Option<Self>;
    fn to_complex(self) -> Complex64;
    fn modulus(self) -> f64;
    fn scale(self, x: f64) -> Self;
    fn conjugate(self) -> Self;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn from_complex(z: Complex64) -> Option<Self> {
        (z.im == 0.0).then_some(z.re)
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn scale(self, x: f64) -> Self {
        self * x
    }
    fn conjugate(self) -> Self {
        self
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn from_complex(z: Complex64) -> Option<Self> {
        Some(z)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn scale(self, x: f64) -> Self {
        self * x
    }
    fn conjugate(self) -> Self {
        self.conj()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymMatrix<T = f64> {
    dim: usize,
    col_ptr: Vec<usize>,
    rows: Vec<u32>,
    vals: Vec<T>,
}

impl<T: Scalar> SparseSymMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, col_ptr: vec![0; dim + 1], rows: Vec::new(), vals: Vec::new() }
    }

    /// Builds from `(row, col, value)` entries with `row <= col`; duplicates
    /// are summed and exact zeros dropped.
    pub fn from_upper_triplets(dim: usize, mut entries: Vec<(u32, u32, T)>) -> Result<Self, Error> {
        if let Some(&(r, c, _)) = entries.iter().find(|(r, c, _)| r > c || *c as usize >= dim) {
            return Err(Error::InvalidParameter(format!("entry ({r}, {c}) outside the upper triangle of a {dim}x{dim} matrix")));
        }
        entries.sort_by_key(|&(r, c, _)| (c, r));
        let mut col_ptr = vec![0usize; dim + 1];
        let mut rows = Vec::with_capacity(entries.len());
        let mut vals: Vec<T> = Vec::with_capacity(entries.len());
        let mut last: Option<(u32, u32)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            rows.push(r);
            vals.push(v);
            col_ptr[c as usize + 1] += 1;
        }
        for j in 0..dim {
            col_ptr[j + 1] += col_ptr[j];
        }
        let mut m = Self { dim, col_ptr, rows, vals };
        m.prune();
        Ok(m)
    }

    /// Builds from already sorted, duplicate-free columns.
    pub(crate) fn from_columns(dim: usize, columns: Vec<Vec<(u32, T)>>) -> Self {
        let mut col_ptr = Vec::with_capacity(dim + 1);
        col_ptr.push(0);
        let nnz = columns.iter().map(Vec::len).sum();
        let mut rows = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        for col in columns {
            for (r, v) in col {
                rows.push(r);
                vals.push(v);
            }
            col_ptr.push(rows.len());
        }
        Self { dim, col_ptr, rows, vals }
    }

    fn prune(&mut self) {
        let mut col_ptr = vec![0usize; self.dim + 1];
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for j in 0..self.dim {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                if self.vals[k] != T::zero() {
                    rows.push(self.rows[k]);
                    vals.push(self.vals[k]);
                }
            }
            col_ptr[j + 1] = rows.len();
        }
        *self = Self { dim: self.dim, col_ptr, rows, vals };
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored (upper-triangle) entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Upper-triangle entries of column `j` as `(row, value)`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.rows[range.clone()].iter().zip(&self.vals[range]).map(|(&r, &v)| (r as usize, v))
    }

    /// All stored entries `(row, col, value)` in column-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.dim).flat_map(move |j| self.column(j).map(move |(i, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        let range = self.col_ptr[c]..self.col_ptr[c + 1];
        match self.rows[range.clone()].binary_search(&(r as u32)) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|j| self.get(j, j)).collect()
    }

    /// `y = A x` using both triangles.
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.iter_mut().for_each(|v| *v = T::zero());
        for j in 0..self.dim {
            let xj = x[j];
            let mut acc = T::zero();
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.rows[k] as usize;
                let v = self.vals[k];
                y[i] += v * xj;
                if i != j {
                    acc += v * x[i];
                }
            }
            y[j] += acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim];
        self.matvec(x, &mut y);
        y
    }

    /// `sum_k w_k A_k` over real matrices of equal dimension.
    pub fn linear_combination(terms: &[(T, &SparseSymMatrix<f64>)]) -> Result<Self, Error> {
        let dim = terms.first().map_or(0, |(_, m)| m.dim);
        if terms.iter().any(|(_, m)| m.dim != dim) {
            return Err(Error::InvalidParameter("matrices of different dimension".into()));
        }
        let mut columns = Vec::with_capacity(dim);
        let mut merged: Vec<(u32, T)> = Vec::new();
        for j in 0..dim {
            merged.clear();
            for (w, m) in terms {
                if *w == T::zero() {
                    continue;
                }
                for k in m.col_ptr[j]..m.col_ptr[j + 1] {
                    merged.push((m.rows[k], *w * T::from_real(m.vals[k])));
                }
            }
            merged.sort_by_key(|e| e.0);
            let mut col: Vec<(u32, T)> = Vec::with_capacity(merged.len());
            for &(r, v) in &merged {
                match col.last_mut() {
                    Some(last) if last.0 == r => last.1 += v,
                    _ => col.push((r, v)),
                }
            }
            columns.push(col);
        }
        Ok(Self::from_columns(dim, columns))
    }

    pub fn to_dense(&self) -> Mat<T> {
        let mut m = Mat::<T>::zeros(self.dim, self.dim);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        self.iter().map(|(i, j, _)| j - i).max().unwrap_or(0)
    }

    /// Largest column index coupled to each column `j` (including `j`).
    pub fn reach(&self) -> Vec<usize> {
        let mut reach: Vec<usize> = (0..self.dim).collect();
        for (i, j, _) in self.iter() {
            reach[i] = reach[i].max(j);
        }
        reach
    }
}

impl<T: Scalar + LowerExp> SparseSymMatrix<T> {
    /// Text dump, one stored entry per line: `row col value`.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, j, v) in self.iter() {
            writeln!(w, "{i} {j} {v:e}")?;
        }
        Ok(())
    }
}

impl SparseSymMatrix<f64> {
    /// Complex copy.
    pub fn to_complex(&self) -> SparseSymMatrix<Complex64> {
        SparseSymMatrix {
            dim: self.dim,
            col_ptr: self.col_ptr.clone(),
            rows: self.rows.clone(),
            vals: self.vals.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn scaled(&self, w: f64) -> Self {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= w);
        m
    }
}
