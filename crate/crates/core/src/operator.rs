//! The Galerkin operator `𝒜 = Σ_i G_i ⊗ K_i` acting on low-rank factors and
//! on plain vectors, plus the mean-based preconditioner `M_0 = G_0 ⊗ K_0`.

use nalgebra::{DMatrix, DVector};

use crate::banded::BandedLu;
use crate::error::{dim_mismatch, Error, Result};
use crate::lowrank::LowRankFactor;
use crate::scalar::{cone, cre, czero, Cx, Real};
use crate::sparse::CsrMatrix;

/// How [`KronOperator::apply`] forms its result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatvecMode {
    /// `U' = [K_0U | … | K_NU]`, `V' = [G_0V | … | G_NV]`.
    #[default]
    Factored,
    /// `U' = Σ_i K_i X G_iᵀ` as a dense `J×Q_s` block and `V' = I`.
    DenseAccumulate,
}

/// Default limit on `J·Q_s` for explicit assembly of `𝒜`.
pub const FULL_ASSEMBLY_LIMIT: usize = 250_000;

#[derive(Debug, Clone)]
pub struct KronOperator<R: Real> {
    g: Vec<CsrMatrix<R>>,
    g_c: Vec<CsrMatrix<Cx<R>>>,
    g_ct: Vec<CsrMatrix<Cx<R>>>,
    k: Vec<CsrMatrix<Cx<R>>>,
    k_h: Vec<CsrMatrix<Cx<R>>>,
    mode: MatvecMode,
}

impl<R: Real> KronOperator<R> {
    pub fn new(g: Vec<CsrMatrix<R>>, k: Vec<CsrMatrix<Cx<R>>>) -> Result<Self> {
        if g.len() != k.len() {
            return Err(dim_mismatch("Kronecker terms", g.len(), k.len()));
        }
        if g.is_empty() {
            return Err(Error::InvalidParameter("operator needs at least one term".into()));
        }
        let qs = g[0].nrows();
        let j = k[0].nrows();
        for gi in &g {
            if gi.nrows() != qs || gi.ncols() != qs {
                return Err(dim_mismatch("stochastic matrix", format!("{qs}x{qs}"), format!("{}x{}", gi.nrows(), gi.ncols())));
            }
        }
        for ki in &k {
            if ki.nrows() != j || ki.ncols() != j {
                return Err(dim_mismatch("spatial matrix", format!("{j}x{j}"), format!("{}x{}", ki.nrows(), ki.ncols())));
            }
        }
        let g_c: Vec<_> = g.iter().map(|m| m.map(cre)).collect();
        let g_ct = g_c.iter().map(|m| m.transpose()).collect();
        let k_h = k.iter().map(|m| m.adjoint()).collect();
        Ok(Self {
            g,
            g_c,
            g_ct,
            k,
            k_h,
            mode: MatvecMode::Factored,
        })
    }

    pub fn with_matvec_mode(mut self, mode: MatvecMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn matvec_mode(&self) -> MatvecMode {
        self.mode
    }

    /// Number of Kronecker terms, `N + 1`.
    pub fn terms(&self) -> usize {
        self.g.len()
    }

    /// `J`.
    pub fn spatial_dim(&self) -> usize {
        self.k[0].nrows()
    }

    /// `Q_s`.
    pub fn stochastic_dim(&self) -> usize {
        self.g[0].nrows()
    }

    /// `J·Q_s`.
    pub fn size(&self) -> usize {
        self.spatial_dim() * self.stochastic_dim()
    }

    pub fn g(&self) -> &[CsrMatrix<R>] {
        &self.g
    }

    pub fn k(&self) -> &[CsrMatrix<Cx<R>>] {
        &self.k
    }

    /// Stored entries of all factor matrices.
    pub fn factor_nnz(&self) -> usize {
        self.g.iter().map(CsrMatrix::nnz).sum::<usize>() + self.k.iter().map(CsrMatrix::nnz).sum::<usize>()
    }

    fn check(&self, x: &LowRankFactor<R>) -> Result<()> {
        if x.rows() != self.spatial_dim() || x.cols() != self.stochastic_dim() {
            return Err(dim_mismatch(
                "operator apply",
                format!("{}x{}", self.spatial_dim(), self.stochastic_dim()),
                format!("{}x{}", x.rows(), x.cols()),
            ));
        }
        Ok(())
    }

    /// `vec⁻¹(𝒜·vec(X))`, untruncated.
    pub fn apply(&self, x: &LowRankFactor<R>) -> Result<LowRankFactor<R>> {
        self.apply_with(x, &self.k, &self.g_c)
    }

    /// `vec⁻¹(𝒜ᴴ·vec(X))`, untruncated.
    pub fn apply_adjoint(&self, x: &LowRankFactor<R>) -> Result<LowRankFactor<R>> {
        self.apply_with(x, &self.k_h, &self.g_ct)
    }

    fn apply_with(
        &self,
        x: &LowRankFactor<R>,
        k: &[CsrMatrix<Cx<R>>],
        g: &[CsrMatrix<Cx<R>>],
    ) -> Result<LowRankFactor<R>> {
        self.check(x)?;
        let (j, qs, r) = (self.spatial_dim(), self.stochastic_dim(), x.rank());
        if r == 0 {
            return Ok(LowRankFactor::zeros(j, qs));
        }
        match self.mode {
            MatvecMode::Factored => {
                let t = self.terms();
                let mut u = DMatrix::zeros(j, t * r);
                let mut v = DMatrix::zeros(qs, t * r);
                for (i, (ki, gi)) in k.iter().zip(g).enumerate() {
                    u.columns_mut(i * r, r).copy_from(&ki.mul_dense(x.u())?);
                    v.columns_mut(i * r, r).copy_from(&gi.mul_dense(x.v())?);
                }
                LowRankFactor::from_factors(u, v)
            }
            MatvecMode::DenseAccumulate => {
                let mut acc = DMatrix::zeros(j, qs);
                for (ki, gi) in k.iter().zip(g) {
                    acc += ki.mul_dense(x.u())? * gi.mul_dense(x.v())?.transpose();
                }
                LowRankFactor::from_factors(acc, DMatrix::identity(qs, qs))
            }
        }
    }

    /// `𝒜·x` on a plain vector in `vec` ordering.
    pub fn apply_vec(&self, x: &DVector<Cx<R>>) -> Result<DVector<Cx<R>>> {
        let (j, qs) = (self.spatial_dim(), self.stochastic_dim());
        if x.len() != j * qs {
            return Err(dim_mismatch("operator apply", j * qs, x.len()));
        }
        let xm = DMatrix::from_column_slice(j, qs, x.as_slice());
        let mut acc = DMatrix::zeros(j, qs);
        for (ki, gi) in self.k.iter().zip(&self.g_c) {
            let kx = ki.mul_dense(&xm)?;
            acc += gi.mul_dense(&kx.transpose())?.transpose();
        }
        Ok(DVector::from_column_slice(acc.as_slice()))
    }

    /// Explicit sparse `Σ_i G_i ⊗ K_i`.
    pub fn assemble_full(&self, limit: usize) -> Result<CsrMatrix<Cx<R>>> {
        let n = self.size();
        if n > limit {
            return Err(Error::SizeLimit {
                context: "explicit operator assembly",
                size: n,
                limit,
            });
        }
        let j = self.spatial_dim();
        let est: usize = self.g.iter().zip(&self.k).map(|(g, k)| g.nnz() * k.nnz()).sum();
        let mut t = Vec::with_capacity(est);
        for (gi, ki) in self.g.iter().zip(&self.k) {
            for (a, b, gab) in gi.triplets() {
                for (r, c, kv) in ki.triplets() {
                    t.push((a * j + r, b * j + c, kv * cre(gab)));
                }
            }
        }
        Ok(CsrMatrix::from_triplets(n, n, &t))
    }
}

/// Right-hand side `B = s·g_0ᵀ` with `g_0 = e_1`; rank 0 when `s = 0`.
pub fn rhs_lowrank<R: Real>(spatial: &DVector<Cx<R>>, basis_count: usize) -> LowRankFactor<R> {
    if spatial.iter().all(|v| *v == czero()) || basis_count == 0 {
        return LowRankFactor::zeros(spatial.len(), basis_count);
    }
    let mut g0 = DVector::from_element(basis_count, czero());
    g0[0] = cone();
    LowRankFactor::outer(spatial.clone(), g0)
}

/// Storage of the `K_0` solve inside [`MeanPreconditioner`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrecondStorage {
    /// Banded LU factors of `K_0`.
    #[default]
    BandedLu,
    /// Explicit dense `K_0⁻¹`.
    DenseInverse,
}

#[derive(Debug, Clone)]
enum K0Solve<R: Real> {
    Banded(BandedLu<Cx<R>>),
    Dense {
        inv: DMatrix<Cx<R>>,
        inv_h: DMatrix<Cx<R>>,
    },
}

/// `M_0⁻¹ = G_0⁻¹ ⊗ K_0⁻¹` for a diagonal `G_0`.
#[derive(Debug, Clone)]
pub struct MeanPreconditioner<R: Real> {
    solve: K0Solve<R>,
    /// `None` when `G_0 = I`.
    g0_inv: Option<Vec<R>>,
    j: usize,
    qs: usize,
    nnz: usize,
    condition_estimate: f64,
}

impl<R: Real> MeanPreconditioner<R> {
    pub fn prepare(k0: &CsrMatrix<Cx<R>>, g0: &CsrMatrix<R>, storage: PrecondStorage) -> Result<Self> {
        let qs = g0.nrows();
        if g0.ncols() != qs {
            return Err(dim_mismatch("G_0", "square", format!("{}x{}", g0.nrows(), g0.ncols())));
        }
        if g0.triplets().any(|(a, b, v)| a != b && v != R::zero()) {
            return Err(Error::InvalidParameter("mean preconditioner needs a diagonal G_0".into()));
        }
        let diag: Vec<R> = (0..qs).map(|a| g0.get(a, a)).collect();
        if diag.iter().any(|d| *d == R::zero()) {
            return Err(Error::Singular {
                condition_estimate: f64::INFINITY,
            });
        }
        let g0_inv = if diag.iter().all(|d| *d == R::one()) {
            None
        } else {
            Some(diag.iter().map(|d| R::one() / *d).collect())
        };
        let lu = BandedLu::factor(k0)?;
        let j = lu.dim();
        let condition_estimate = lu.condition_estimate();
        let (solve, nnz) = match storage {
            PrecondStorage::BandedLu => {
                let nnz = lu.storage();
                (K0Solve::Banded(lu), nnz)
            }
            PrecondStorage::DenseInverse => {
                let inv = lu.solve_matrix(&DMatrix::identity(j, j), false)?;
                let nnz = inv.iter().filter(|v| **v != czero()).count();
                let inv_h = inv.adjoint();
                (K0Solve::Dense { inv, inv_h }, nnz)
            }
        };
        Ok(Self {
            solve,
            g0_inv,
            j,
            qs,
            nnz,
            condition_estimate,
        })
    }

    /// Stored entries of the `K_0` solve operator.
    pub fn nnz(&self) -> usize {
        self.nnz
    }

    /// Pivot-ratio estimate of the reciprocal condition number of `K_0`.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    pub fn storage(&self) -> PrecondStorage {
        match self.solve {
            K0Solve::Banded(_) => PrecondStorage::BandedLu,
            K0Solve::Dense { .. } => PrecondStorage::DenseInverse,
        }
    }

    fn solve_block(&self, b: &DMatrix<Cx<R>>, adjoint: bool) -> Result<DMatrix<Cx<R>>> {
        match &self.solve {
            K0Solve::Banded(lu) => lu.solve_matrix(b, adjoint),
            K0Solve::Dense { inv, inv_h } => {
                if b.nrows() != self.j {
                    return Err(dim_mismatch("preconditioner solve", self.j, b.nrows()));
                }
                Ok(if adjoint { inv_h * b } else { inv * b })
            }
        }
    }

    /// `(K_0⁻¹ U, G_0⁻¹ V)`, or the `K_0ᴴ` solve when `adjoint`.
    pub fn apply(&self, x: &LowRankFactor<R>, adjoint: bool) -> Result<LowRankFactor<R>> {
        if x.rows() != self.j || x.cols() != self.qs {
            return Err(dim_mismatch(
                "preconditioner apply",
                format!("{}x{}", self.j, self.qs),
                format!("{}x{}", x.rows(), x.cols()),
            ));
        }
        if x.rank() == 0 {
            return Ok(x.clone());
        }
        let u = self.solve_block(x.u(), adjoint)?;
        let v = match &self.g0_inv {
            None => x.v().clone(),
            Some(d) => {
                let mut v = x.v().clone();
                for (mut row, s) in v.row_iter_mut().zip(d) {
                    row *= cre(*s);
                }
                v
            }
        };
        LowRankFactor::from_factors(u, v)
    }

    /// `M_0⁻¹ r` on a plain vector, solving column by column of `vec⁻¹(r)`.
    pub fn apply_full(&self, r: &DVector<Cx<R>>, adjoint: bool) -> Result<DVector<Cx<R>>> {
        if r.len() != self.j * self.qs {
            return Err(dim_mismatch("preconditioner apply", self.j * self.qs, r.len()));
        }
        let rm = DMatrix::from_column_slice(self.j, self.qs, r.as_slice());
        let mut x = self.solve_block(&rm, adjoint)?;
        if let Some(d) = &self.g0_inv {
            for (mut col, s) in x.column_iter_mut().zip(d) {
                col *= cre(*s);
            }
        }
        Ok(DVector::from_column_slice(x.as_slice()))
    }
}
