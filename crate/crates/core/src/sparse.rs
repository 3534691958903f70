//! Compressed sparse row storage for the finite element and Kronecker matrices.
//!
//! Entries are stored structurally: assembly keeps explicit zeros so that all
//! matrices built on the same mesh share one pattern.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_traits::Zero;

use crate::error::{dim_mismatch, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: ComplexField + Copy> CsrMatrix<T> {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_unstable_by_key(|&t| (triplets[t].0, triplets[t].1));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for t in order {
            let (i, j, v) = triplets[t];
            assert!(i < nrows && j < ncols, "triplet ({i},{j}) out of bounds");
            if last == Some((i, j)) {
                let slot = values.last_mut().expect("previous entry");
                *slot += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_triplets(nrows, ncols, &[])
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, T::one())).collect();
        Self::from_triplets(n, n, &t)
    }

    pub fn from_dense(m: &DMatrix<T>) -> Self {
        let mut t = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != T::zero() {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), &t)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Structural nonzero count.
    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates `(col, value)` over row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Iterates every stored `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn map<U: ComplexField + Copy>(&self, f: impl Fn(T) -> U) -> CsrMatrix<U> {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &t)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let t: Vec<_> = self
            .triplets()
            .map(|(i, j, v)| (j, i, v.conjugate()))
            .collect();
        Self::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn mul_vec(&self, x: &DVector<T>) -> Result<DVector<T>> {
        if x.len() != self.ncols {
            return Err(dim_mismatch("sparse matvec", self.ncols, x.len()));
        }
        Ok(DVector::from_iterator(
            self.nrows,
            (0..self.nrows).map(|i| self.row(i).fold(T::zero(), |acc, (j, v)| acc + v * x[j])),
        ))
    }

    /// `selfᴴ * x` without forming the adjoint.
    pub fn adjoint_mul_vec(&self, x: &DVector<T>) -> Result<DVector<T>> {
        if x.len() != self.nrows {
            return Err(dim_mismatch("sparse adjoint matvec", self.nrows, x.len()));
        }
        let mut y = DVector::from_element(self.ncols, T::zero());
        for i in 0..self.nrows {
            let xi = x[i];
            for (j, v) in self.row(i) {
                y[j] += v.conjugate() * xi;
            }
        }
        Ok(y)
    }

    /// `self * x` for a dense block of column vectors.
    pub fn mul_dense(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        if x.nrows() != self.ncols {
            return Err(dim_mismatch("sparse-dense product", self.ncols, x.nrows()));
        }
        let mut out = DMatrix::zeros(self.nrows, x.ncols());
        for c in 0..x.ncols() {
            let xc = x.column(c);
            for i in 0..self.nrows {
                let mut acc = T::zero();
                for (j, v) in self.row(i) {
                    acc += v * xc[j];
                }
                out[(i, c)] = acc;
            }
        }
        Ok(out)
    }

    /// Entrywise sum over the union of both patterns.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(dim_mismatch(
                "sparse add",
                format!("{}x{}", self.nrows, self.ncols),
                format!("{}x{}", other.nrows, other.ncols),
            ));
        }
        let t: Vec<_> = self.triplets().chain(other.triplets()).collect();
        Ok(Self::from_triplets(self.nrows, self.ncols, &t))
    }

    /// Kronecker product `self ⊗ other` with block `(a, b)` equal to `self[a, b] * other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.nrows, other.ncols);
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (a, b, g) in self.triplets() {
            for (i, j, k) in other.triplets() {
                t.push((a * p + i, b * q + j, g * k));
            }
        }
        Self::from_triplets(self.nrows * p, self.ncols * q, &t)
    }

    /// Lower and upper bandwidths of the stored pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for (i, j, _) in self.triplets() {
            if i > j {
                kl = kl.max(i - j);
            } else {
                ku = ku.max(j - i);
            }
        }
        (kl, ku)
    }

    /// Max entrywise modulus of `self - selfᵀ`.
    pub fn symmetry_defect(&self) -> T::RealField {
        let mut worst = T::RealField::zero();
        for (i, j, v) in self.triplets() {
            let d = (v - self.get(j, i)).modulus();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    /// Same sparsity pattern (ignoring values).
    pub fn same_pattern<U>(&self, other: &CsrMatrix<U>) -> bool {
        self.nrows == other.nrows
            && self.ncols == other.ncols
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
    }
}
