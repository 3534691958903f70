//! Matrices held in factored form `X = U·Vᵀ`.
//!
//! A [`LowRankFactor`] is the vector format of the low-rank solver: the
//! solver's vector of length `J·Q_s` is `vec(X)` for the `J×Q_s` matrix `X`.
//! Note the plain transpose: `V` is not conjugated.
//!
//! After [`LowRankFactor::truncate`] the factors are in canonical form: the
//! columns of `V` are orthonormal and the columns of `U` are mutually
//! orthogonal with norms equal to the retained singular values.

use nalgebra::{DMatrix, DVector};

use crate::error::{dim_mismatch, Result};
use crate::scalar::{czero, Cx, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct LowRankFactor<R: Real> {
    u: DMatrix<Cx<R>>,
    v: DMatrix<Cx<R>>,
}

impl<R: Real> LowRankFactor<R> {
    /// The zero matrix of shape `rows × cols`, stored at rank 0.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            u: DMatrix::zeros(rows, 0),
            v: DMatrix::zeros(cols, 0),
        }
    }

    pub fn from_factors(u: DMatrix<Cx<R>>, v: DMatrix<Cx<R>>) -> Result<Self> {
        if u.ncols() != v.ncols() {
            return Err(dim_mismatch("low-rank factors", u.ncols(), v.ncols()));
        }
        Ok(Self { u, v })
    }

    /// Rank-one factor `a·bᵀ`.
    pub fn outer(a: DVector<Cx<R>>, b: DVector<Cx<R>>) -> Self {
        Self {
            u: DMatrix::from_column_slice(a.len(), 1, a.as_slice()),
            v: DMatrix::from_column_slice(b.len(), 1, b.as_slice()),
        }
    }

    /// Factors a dense matrix to relative Frobenius accuracy `eps_rel`.
    pub fn from_dense(m: &DMatrix<Cx<R>>, eps_rel: R) -> Self {
        let (rows, cols) = m.shape();
        if rows == 0 || cols == 0 {
            return Self::zeros(rows, cols);
        }
        let svd = m.clone().svd(true, true);
        let u = svd.u.expect("left singular vectors");
        let vt = svd.v_t.expect("right singular vectors");
        Self::from_svd_parts(rows, cols, &u, &svd.singular_values, &vt, None, None, eps_rel)
    }

    /// Reconstructs `X` from a vector in column-major `vec` ordering.
    pub fn from_vec(x: &DVector<Cx<R>>, rows: usize, cols: usize, eps_rel: R) -> Result<Self> {
        if x.len() != rows * cols {
            return Err(dim_mismatch("vec⁻¹", rows * cols, x.len()));
        }
        Ok(Self::from_dense(&DMatrix::from_column_slice(rows, cols, x.as_slice()), eps_rel))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.v.nrows()
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.u.ncols()
    }

    pub fn u(&self) -> &DMatrix<Cx<R>> {
        &self.u
    }

    pub fn v(&self) -> &DMatrix<Cx<R>> {
        &self.v
    }

    pub fn into_factors(self) -> (DMatrix<Cx<R>>, DMatrix<Cx<R>>) {
        (self.u, self.v)
    }

    pub fn to_dense(&self) -> DMatrix<Cx<R>> {
        if self.rank() == 0 {
            return DMatrix::zeros(self.rows(), self.cols());
        }
        &self.u * self.v.transpose()
    }

    /// `vec(X)` in column-major order.
    pub fn to_vec(&self) -> DVector<Cx<R>> {
        let d = self.to_dense();
        DVector::from_column_slice(d.as_slice())
    }

    fn check_shape(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(dim_mismatch(
                context,
                format!("{}x{}", self.rows(), self.cols()),
                format!("{}x{}", other.rows(), other.cols()),
            ));
        }
        Ok(())
    }

    /// `X + Y` by concatenating factors; rank is `r_X + r_Y`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other, "low-rank add")?;
        let (ra, rb) = (self.rank(), other.rank());
        let mut u = DMatrix::zeros(self.rows(), ra + rb);
        let mut v = DMatrix::zeros(self.cols(), ra + rb);
        u.columns_mut(0, ra).copy_from(&self.u);
        u.columns_mut(ra, rb).copy_from(&other.u);
        v.columns_mut(0, ra).copy_from(&self.v);
        v.columns_mut(ra, rb).copy_from(&other.v);
        Ok(Self { u, v })
    }

    /// `X + s·Y`, untruncated.
    pub fn axpy(&self, s: Cx<R>, other: &Self) -> Result<Self> {
        self.add(&other.scale(s))
    }

    /// `s·X`; only `U` is scaled.
    pub fn scale(&self, s: Cx<R>) -> Self {
        Self {
            u: &self.u * s,
            v: self.v.clone(),
        }
    }

    /// Trace inner product `vec(Y)ᴴ·vec(X)` with `Y = other`: linear in
    /// `self`, conjugate-linear in `other`.
    ///
    /// Evaluated from the Gram products `U_Yᴴ U_X` and `V_Yᴴ V_X`.
    pub fn inner(&self, other: &Self) -> Result<Cx<R>> {
        self.check_shape(other, "low-rank inner product")?;
        if self.rank() == 0 || other.rank() == 0 {
            return Ok(czero());
        }
        let gu = other.u.adjoint() * &self.u;
        let gv = other.v.adjoint() * &self.v;
        Ok(gu.component_mul(&gv).sum())
    }

    /// Frobenius norm of the dense matrix.
    pub fn frob_norm(&self) -> R {
        let s = self.inner(self).expect("same shape").re;
        if s > R::zero() {
            s.sqrt()
        } else {
            R::zero()
        }
    }

    /// Rank reduction to relative Frobenius accuracy `eps_rel`.
    ///
    /// Keeps the smallest rank `r'` whose discarded singular values satisfy
    /// `sqrt(Σ_{i>r'} σ_i²) <= eps_rel · sqrt(Σ_i σ_i²)`. Works on thin QR
    /// factors of `U` and `V` and an SVD of their small core, so the dense
    /// `J×Q_s` matrix is never formed.
    pub fn truncate(&self, eps_rel: R) -> Self {
        if self.rank() == 0 {
            return self.clone();
        }
        let (rows, cols) = (self.rows(), self.cols());
        let qr_u = self.u.clone().qr();
        let qr_v = self.v.clone().qr();
        let (qu, ru) = (qr_u.q(), qr_u.r());
        let (qv, rv) = (qr_v.q(), qr_v.r());
        let core = &ru * rv.transpose();
        let svd = core.svd(true, true);
        let w = svd.u.expect("left singular vectors");
        let zt = svd.v_t.expect("right singular vectors");
        Self::from_svd_parts(rows, cols, &w, &svd.singular_values, &zt, Some(&qu), Some(&qv), eps_rel)
    }

    /// Builds the canonical factor from `Qu·W·Σ·Zᴴ·Qvᵀ`, where `W`, `Σ`, `Zᴴ`
    /// come from an SVD and `Qu`, `Qv` (if given) have orthonormal columns.
    #[allow(clippy::too_many_arguments)]
    fn from_svd_parts(
        rows: usize,
        cols: usize,
        w: &DMatrix<Cx<R>>,
        sigma: &DVector<R>,
        zt: &DMatrix<Cx<R>>,
        qu: Option<&DMatrix<Cx<R>>>,
        qv: Option<&DMatrix<Cx<R>>>,
        eps_rel: R,
    ) -> Self {
        let mut order: Vec<usize> = (0..sigma.len()).collect();
        order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap_or(std::cmp::Ordering::Equal));
        let sorted: Vec<R> = order.iter().map(|&k| sigma[k]).collect();
        let keep = retained_rank(&sorted, eps_rel);

        let mut u_small = DMatrix::zeros(w.nrows(), keep);
        let mut v_small = DMatrix::zeros(zt.ncols(), keep);
        for (c, &k) in order.iter().take(keep).enumerate() {
            let s = sigma[k];
            for i in 0..w.nrows() {
                u_small[(i, c)] = w[(i, k)] * s;
            }
            // conj(Z) column k is row k of Zᴴ, transposed.
            for i in 0..zt.ncols() {
                v_small[(i, c)] = zt[(k, i)];
            }
        }
        let u = match qu {
            Some(q) => q * u_small,
            None => u_small,
        };
        let v = match qv {
            Some(q) => q * v_small,
            None => v_small,
        };
        debug_assert_eq!(u.nrows(), rows);
        debug_assert_eq!(v.nrows(), cols);
        Self { u, v }
    }
}

/// Smallest `r` such that the Frobenius tail of the (descending) singular
/// values beyond `r` is at most `eps_rel` times the total.
pub fn retained_rank<R: Real>(sorted_sigma: &[R], eps_rel: R) -> usize {
    let n = sorted_sigma.len();
    let mut suffix = vec![R::zero(); n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + sorted_sigma[i] * sorted_sigma[i];
    }
    let total = suffix[0];
    if total.is_zero() {
        return 0;
    }
    let bound = eps_rel * eps_rel * total;
    (0..=n).find(|&r| suffix[r] <= bound).unwrap_or(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cone, cx};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Cx<f64>;

    fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<C> {
        DMatrix::from_fn(r, c, |_, _| cx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn rand_lr(rng: &mut ChaCha8Rng, r: usize, c: usize, k: usize) -> LowRankFactor<f64> {
        LowRankFactor::from_factors(rand_mat(rng, r, k), rand_mat(rng, c, k)).unwrap()
    }

    #[test]
    fn from_dense_rank_one_and_identity() {
        let u = DVector::from_vec(vec![cx(1.0, 0.5), cx(-2.0, 0.0), cx(0.0, 1.0)]);
        let v = DVector::from_vec(vec![cx(0.3, -0.1), cx(1.0, 1.0)]);
        let m = &u * v.transpose();
        let f = LowRankFactor::from_dense(&m, 1e-6);
        assert_eq!(f.rank(), 1);
        assert!((f.to_dense() - &m).norm() < 1e-13);

        let id = DMatrix::<C>::identity(2, 2);
        assert_eq!(LowRankFactor::from_dense(&id, 1e-6).rank(), 2);
    }

    #[test]
    fn from_dense_exact_reproduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = rand_mat(&mut rng, 20, 15);
        let f = LowRankFactor::from_dense(&m, 0.0);
        assert!((f.to_dense() - &m).norm() / m.norm() < 1e-13);
        let z = LowRankFactor::<f64>::from_dense(&DMatrix::zeros(4, 3), 1e-6);
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn truncate_drops_tiny_singular_value() {
        // X = diag(1, 1e-9) embedded via orthonormal factors
        let u = DMatrix::from_row_slice(3, 2, &[cone(), czero(), czero(), cx(1e-9, 0.0), czero(), czero()]);
        let v = DMatrix::from_row_slice(2, 2, &[cone(), czero(), czero(), cone()]);
        let x = LowRankFactor::from_factors(u, v).unwrap();
        let t = x.truncate(1e-6);
        assert_eq!(t.rank(), 1);
        assert!((t.to_dense() - x.to_dense()).norm() <= 1e-6 * x.frob_norm());
    }

    #[test]
    fn truncate_keeps_canonical_rank_one() {
        let x = LowRankFactor::outer(
            DVector::from_vec(vec![cx(2.0, 0.0), cx(0.0, 1.0)]),
            DVector::from_vec(vec![cx(0.6, 0.0), cx(0.0, 0.8)]),
        );
        let t = x.truncate(1e-6);
        assert_eq!(t.rank(), 1);
        assert!((t.to_dense() - x.to_dense()).norm() < 1e-14);
    }

    #[test]
    fn truncate_canonical_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = rand_lr(&mut rng, 12, 9, 5).add(&rand_lr(&mut rng, 12, 9, 2)).unwrap();
        let t = x.truncate(0.0);
        assert!(t.rank() <= 7);
        let gv = t.v().adjoint() * t.v();
        assert!((gv - DMatrix::<C>::identity(t.rank(), t.rank())).norm() < 1e-12);
        let gu = t.u().adjoint() * t.u();
        for i in 0..t.rank() {
            for j in 0..t.rank() {
                if i != j {
                    assert!(gu[(i, j)].norm() < 1e-12);
                }
            }
        }
        assert!((t.to_dense() - x.to_dense()).norm() / x.frob_norm() < 1e-12);
    }

    #[test]
    fn add_scale_and_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = rand_lr(&mut rng, 6, 4, 2);
        let y = rand_lr(&mut rng, 6, 4, 3);
        let z = LowRankFactor::zeros(6, 4);
        assert_eq!(x.add(&z).unwrap(), x);
        let s = x.add(&y).unwrap();
        assert_eq!(s.rank(), 5);
        assert!((s.to_dense() - x.to_dense() - y.to_dense()).norm() < 1e-13);
        let d = x.add(&x).unwrap();
        assert!((d.to_dense() - x.to_dense() * cx(2.0, 0.0)).norm() < 1e-13);

        assert_eq!(x.scale(cone()), x);
        assert!(x.scale(czero()).to_dense().norm() == 0.0);
        let sc = x.scale(cx(2.0, -3.0));
        assert!((sc.to_dense() - x.to_dense() * cx(2.0, -3.0)).norm() < 1e-14 * 10.0);
        assert!(x.add(&LowRankFactor::zeros(5, 4)).is_err());
    }

    #[test]
    fn inner_and_norm_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = rand_lr(&mut rng, 10, 7, 3);
        let y = rand_lr(&mut rng, 10, 7, 3);
        let dense = y.to_vec().dotc(&x.to_vec());
        let lr = x.inner(&y).unwrap();
        assert!((lr - dense).norm() / dense.norm() < 1e-12);
        let w = rand_lr(&mut rng, 10, 7, 4);
        assert!((w.frob_norm() - w.to_dense().norm()).abs() / w.to_dense().norm() < 1e-12);
        assert_eq!(LowRankFactor::<f64>::zeros(3, 3).frob_norm(), 0.0);

        let unit: LowRankFactor<f64> = LowRankFactor::outer(
            DVector::from_vec(vec![cx(0.6, 0.0), cx(0.0, 0.8)]),
            DVector::from_vec(vec![cx(0.0, 1.0)]),
        );
        assert!((unit.inner(&unit).unwrap() - cone()).norm() < 1e-15);
        assert!((unit.frob_norm() - 1.0).abs() < 1e-15);

        let a: LowRankFactor<f64> = LowRankFactor::outer(
            DVector::from_vec(vec![cone(), czero()]),
            DVector::from_vec(vec![cone()]),
        );
        let b = LowRankFactor::outer(
            DVector::from_vec(vec![czero(), cone()]),
            DVector::from_vec(vec![cone()]),
        );
        assert_eq!(a.inner(&b).unwrap(), czero());
    }

    #[test]
    fn tail_rule() {
        assert_eq!(retained_rank(&[3.0, 2.0, 1.0], 0.0), 3);
        assert_eq!(retained_rank(&[3.0, 2.0, 0.0], 0.0), 2);
        assert_eq!(retained_rank::<f64>(&[0.0, 0.0], 0.5), 0);
        // tail of a single 1 against total 14: 1/sqrt(14) ≈ 0.267
        assert_eq!(retained_rank(&[3.0, 2.0, 1.0], 0.27), 2);
        assert_eq!(retained_rank(&[3.0, 2.0, 1.0], 0.26), 3);
        assert_eq!(retained_rank(&[3.0, 2.0, 1.0], 1.0), 0);
    }
}
