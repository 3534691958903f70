//! Banded LU factorization with partial pivoting.
//!
//! Layout follows the LAPACK `gbtrf` convention: entry `(i, j)` lives in
//! column `j` at band offset `kl + ku + i - j`, leaving `kl` extra
//! superdiagonals for the fill produced by row interchanges.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_traits::Zero;

use crate::error::{dim_mismatch, Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<T>,
    ipiv: Vec<usize>,
}

impl<T: ComplexField + Copy> BandedLu<T> {
    /// Factors a square sparse matrix. Fails when a zero pivot is met or the
    /// pivot-ratio condition estimate falls below machine precision.
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(dim_mismatch("banded LU", "square matrix", format!("{}x{}", a.nrows(), a.ncols())));
        }
        let n = a.nrows();
        let (kl, ku) = a.bandwidths();
        let ldab = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            ku,
            ldab,
            ab: vec![T::zero(); ldab * n],
            ipiv: vec![0; n],
        };
        for (i, j, v) in a.triplets() {
            let k = lu.idx(i, j);
            lu.ab[k] += v;
        }
        lu.eliminate()?;
        Ok(lu)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    fn eliminate(&mut self) -> Result<()> {
        let n = self.n;
        let kl = self.kl;
        let kv = self.kl + self.ku;
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = 0;
            let mut best = self.ab[self.idx(j, j)].modulus();
            for r in 1..=km {
                let m = self.ab[self.idx(j + r, j)].modulus();
                if m > best {
                    best = m;
                    p = r;
                }
            }
            self.ipiv[j] = j + p;
            if best.is_zero() {
                return Err(Error::Singular {
                    condition_estimate: f64::INFINITY,
                });
            }
            ju = ju.max((j + self.ku + p).min(n - 1));
            if p != 0 {
                for c in j..=ju {
                    let a = self.idx(j, c);
                    let b = self.idx(j + p, c);
                    self.ab.swap(a, b);
                }
            }
            if km > 0 {
                let inv = T::one() / self.ab[self.idx(j, j)];
                for r in 1..=km {
                    let k = self.idx(j + r, j);
                    self.ab[k] *= inv;
                }
                for c in (j + 1)..=ju {
                    let u = self.ab[self.idx(j, c)];
                    if u.is_zero() {
                        continue;
                    }
                    for r in 1..=km {
                        // (j + r, c) stays inside the band since c - j <= kv.
                        debug_assert!(c - j <= kv);
                        let l = self.ab[self.idx(j + r, j)];
                        let k = self.idx(j + r, c);
                        self.ab[k] -= l * u;
                    }
                }
            }
        }
        let cond = self.condition_estimate();
        if !(cond > f64::EPSILON) {
            return Err(Error::Singular {
                condition_estimate: 1.0 / cond,
            });
        }
        Ok(())
    }

    /// Ratio of smallest to largest pivot modulus; a cheap reciprocal
    /// condition indicator.
    pub fn condition_estimate(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for j in 0..self.n {
            let m: f64 = nalgebra::try_convert(self.ab[self.idx(j, j)].modulus()).unwrap_or(f64::NAN);
            lo = lo.min(m);
            hi = hi.max(m);
        }
        if self.n == 0 {
            1.0
        } else {
            lo / hi
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored band entries (the storage cost of the factorization).
    pub fn storage(&self) -> usize {
        self.ab.len()
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.n;
        let kv = self.kl + self.ku;
        for j in 0..n {
            let km = self.kl.min(n - 1 - j);
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if !bj.is_zero() {
                for r in 1..=km {
                    b[j + r] -= self.ab[self.idx(j + r, j)] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[self.idx(j, j)];
            let bj = b[j];
            if bj.is_zero() {
                continue;
            }
            for i in j.saturating_sub(kv)..j {
                b[i] -= self.ab[self.idx(i, j)] * bj;
            }
        }
    }

    /// Solves `Aᴴ x = b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [T]) {
        let n = self.n;
        let kv = self.kl + self.ku;
        for j in 0..n {
            let mut acc = b[j];
            for i in j.saturating_sub(kv)..j {
                acc -= self.ab[self.idx(i, j)].conjugate() * b[i];
            }
            b[j] = acc / self.ab[self.idx(j, j)].conjugate();
        }
        for j in (0..n).rev() {
            let km = self.kl.min(n - 1 - j);
            let mut acc = b[j];
            for r in 1..=km {
                acc -= self.ab[self.idx(j + r, j)].conjugate() * b[j + r];
            }
            b[j] = acc;
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
        }
    }

    /// Solves against every column of `b`.
    pub fn solve_matrix(&self, b: &DMatrix<T>, adjoint: bool) -> Result<DMatrix<T>> {
        if b.nrows() != self.n {
            return Err(dim_mismatch("banded solve", self.n, b.nrows()));
        }
        let mut x = b.clone();
        for mut col in x.column_iter_mut() {
            let s = col.as_mut_slice();
            if adjoint {
                self.solve_adjoint_in_place(s);
            } else {
                self.solve_in_place(s);
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &DVector<T>, adjoint: bool) -> Result<DVector<T>> {
        if b.len() != self.n {
            return Err(dim_mismatch("banded solve", self.n, b.len()));
        }
        let mut x = b.clone();
        if adjoint {
            self.solve_adjoint_in_place(x.as_mut_slice());
        } else {
            self.solve_in_place(x.as_mut_slice());
        }
        Ok(x)
    }
}
