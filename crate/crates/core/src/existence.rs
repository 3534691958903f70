//! Computable side of the low-rank existence theory: sinc quadrature for
//! inverses of Kronecker sums, the Sherman–Morrison–Woodbury solve, and the
//! splitting `𝒜 = G_0⊗K_0 + U Vᵀ`.
//!
//! For `M` with spectrum in the open right half-plane and `μ > 0`,
//!
//! ```text
//! M⁻¹ = (2/μ) ∫_0^∞ exp(-2tM/μ) dt ≈ (2/μ) Σ_{j=-k}^{k} w_j exp(-2 t_j M/μ)
//! ```
//!
//! with `t_j = asinh(e^{jh})`, `w_j = h / sqrt(1 + e^{-2jh})`, `h = π/√k`.
//! A Kronecker sum `A = Σ_i I⊗…⊗A_i⊗…⊗I` has `exp(-sA) = ⊗_i exp(-sA_i)`.
//! When the spectrum lies in the upper half-plane instead, the rule is
//! applied to `M = -iA` and the result multiplied by `-i`.

use std::io::Write;

use nalgebra::{ComplexField, DMatrix, DVector, Schur};

use crate::error::{dim_mismatch, Error, Result};
use crate::operator::KronOperator;
use crate::scalar::{cre, cx, czero, Cx, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct SincRule<R: Real> {
    pub k: usize,
    pub h: R,
    /// `t_j` for `j = -k..=k`.
    pub nodes: Vec<R>,
    pub weights: Vec<R>,
}

impl<R: Real> SincRule<R> {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("sinc rule needs k >= 1".into()));
        }
        let h = R::pi() / R::from_count(k).sqrt();
        let (mut nodes, mut weights) = (Vec::with_capacity(2 * k + 1), Vec::with_capacity(2 * k + 1));
        let ki = k as i64;
        for j in -ki..=ki {
            let jh = R::from_i64(j).expect("index representable") * h;
            nodes.push(jh.exp().asinh());
            weights.push(h / (R::one() + (-(jh + jh)).exp()).sqrt());
        }
        Ok(Self { k, h, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Imaginary-part bounds `[μ_min, μ_max]` and real-part bound `λ` of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripSpectrumInfo<R> {
    pub mu_min: R,
    pub mu_max: R,
    pub lambda: R,
}

impl<R: Real> StripSpectrumInfo<R> {
    pub fn from_eigenvalues(eigs: &[Cx<R>]) -> Option<Self> {
        let first = eigs.first()?;
        let mut s = Self {
            mu_min: first.im,
            mu_max: first.im,
            lambda: first.re.abs(),
        };
        for e in eigs {
            s.mu_min = s.mu_min.min(e.im);
            s.mu_max = s.mu_max.max(e.im);
            s.lambda = s.lambda.max(e.re.abs());
        }
        Some(s)
    }

    /// `0 < μ_min ≤ μ_max`.
    pub fn in_upper_half_plane(&self) -> bool {
        self.mu_min > R::zero()
    }
}

/// Transformation applied before the quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    /// Spectrum in the right half-plane; `M = A`.
    None,
    /// Spectrum in the upper half-plane; `M = -iA`, result scaled by `-i`.
    MinusI,
}

impl Rotation {
    pub fn name(self) -> &'static str {
        match self {
            Rotation::None => "none",
            Rotation::MinusI => "minus_i",
        }
    }

    fn pre<R: Real>(self) -> Cx<R> {
        match self {
            Rotation::None => cre(R::one()),
            Rotation::MinusI => cx(R::zero(), -R::one()),
        }
    }
}

fn eigenvalues<R: Real>(a: &DMatrix<Cx<R>>) -> Result<Vec<Cx<R>>> {
    Schur::new(a.clone())
        .eigenvalues()
        .map(|e| e.iter().copied().collect())
        .ok_or_else(|| Error::NonFinite("Schur form did not yield eigenvalues".into()))
}

/// Picks the rotation for a Kronecker sum of `factors` from the factor spectra.
pub fn admissible_rotation<R: Real>(factors: &[DMatrix<Cx<R>>]) -> Result<Rotation> {
    let mut min_re = R::zero();
    let mut min_im = R::zero();
    for f in factors {
        let ev = eigenvalues(f)?;
        if ev.is_empty() {
            continue;
        }
        min_re += ev.iter().map(|e| e.re).fold(ev[0].re, |a, b| a.min(b));
        min_im += ev.iter().map(|e| e.im).fold(ev[0].im, |a, b| a.min(b));
    }
    if min_re > R::zero() {
        Ok(Rotation::None)
    } else if min_im > R::zero() {
        Ok(Rotation::MinusI)
    } else {
        Err(Error::InadmissibleSpectrum(format!(
            "Kronecker-sum spectrum reaches Re = {min_re:e}, Im = {min_im:e}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureAction<R: Real> {
    pub x: DVector<Cx<R>>,
    pub rotation: Rotation,
}

fn check_finite<R: Real>(m: &DMatrix<Cx<R>>) -> Result<()> {
    if m.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("matrix exponential overflowed".into()))
    }
}

/// Approximates `A⁻¹ (b_1⊗…⊗b_d)` for the Kronecker sum of `factors`.
pub fn quadrature_inverse_action<R: Real>(
    factors: &[DMatrix<Cx<R>>],
    b_factors: &[DVector<Cx<R>>],
    rule: &SincRule<R>,
    mu_min: R,
) -> Result<QuadratureAction<R>> {
    if factors.len() != b_factors.len() || factors.is_empty() {
        return Err(dim_mismatch("quadrature factors", factors.len(), b_factors.len()));
    }
    for (a, b) in factors.iter().zip(b_factors) {
        if a.nrows() != a.ncols() || a.nrows() != b.len() {
            return Err(dim_mismatch("quadrature factor", a.nrows(), b.len()));
        }
    }
    if !(mu_min > R::zero()) {
        return Err(Error::InvalidParameter("mu_min must be positive".into()));
    }
    let n: usize = b_factors.iter().map(|b| b.len()).product();
    if b_factors.iter().any(|b| b.iter().all(|v| *v == czero())) {
        return Ok(QuadratureAction {
            x: DVector::zeros(n),
            rotation: Rotation::None,
        });
    }
    let rotation = admissible_rotation(factors)?;
    let rot = rotation.pre::<R>();
    let two_over_mu = R::lit(2.0) / mu_min;
    let mut x = DVector::zeros(n);
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let s = cre(-(*t) * two_over_mu) * rot;
        let mut term: Option<DVector<Cx<R>>> = None;
        for (a, b) in factors.iter().zip(b_factors) {
            let e = (a * s).exp();
            check_finite(&e)?;
            let v = e * b;
            term = Some(match term {
                None => v,
                Some(acc) => acc.kronecker(&v),
            });
        }
        x += term.expect("at least one factor") * cre(*w * two_over_mu);
    }
    // M = rot·A, so A⁻¹ = rot·M⁻¹.
    Ok(QuadratureAction { x: x * rot, rotation })
}

/// Dense approximation of `M⁻¹` for a single matrix by the same rule.
pub fn quadrature_inverse_matrix<R: Real>(a: &DMatrix<Cx<R>>, rule: &SincRule<R>, mu_min: R) -> Result<(DMatrix<Cx<R>>, Rotation)> {
    if a.nrows() != a.ncols() {
        return Err(dim_mismatch("quadrature inverse", "square", format!("{}x{}", a.nrows(), a.ncols())));
    }
    if !(mu_min > R::zero()) {
        return Err(Error::InvalidParameter("mu_min must be positive".into()));
    }
    let rotation = admissible_rotation(std::slice::from_ref(a))?;
    let rot = rotation.pre::<R>();
    let two_over_mu = R::lit(2.0) / mu_min;
    let mut inv = DMatrix::zeros(a.nrows(), a.ncols());
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let e = (a * (cre(-(*t) * two_over_mu) * rot)).exp();
        check_finite(&e)?;
        inv += e * cre(*w * two_over_mu);
    }
    Ok((inv * rot, rotation))
}

/// `(L + U Vᵀ)⁻¹ b` using only solves with `L` and an `m×m` core.
pub fn smw_solve<R, F>(l_solve: F, u: &DMatrix<Cx<R>>, v: &DMatrix<Cx<R>>, b: &DVector<Cx<R>>) -> Result<DVector<Cx<R>>>
where
    R: Real,
    F: Fn(&DMatrix<Cx<R>>) -> Result<DMatrix<Cx<R>>>,
{
    let n = b.len();
    if u.nrows() != n || v.nrows() != n || u.ncols() != v.ncols() {
        return Err(dim_mismatch("SMW factors", format!("{n}x{}", u.ncols()), format!("{}x{}", v.nrows(), v.ncols())));
    }
    let bm = DMatrix::from_column_slice(n, 1, b.as_slice());
    let y = l_solve(&bm)?;
    let m = u.ncols();
    if m == 0 {
        return Ok(y.column(0).into_owned());
    }
    let lu_inv_u = l_solve(u)?;
    let core = DMatrix::<Cx<R>>::identity(m, m) + v.transpose() * &lu_inv_u;
    let lu = core.lu();
    let diag = lu.u().diagonal();
    let (mut lo, mut hi) = (R::max_value().expect("bounded real"), R::zero());
    for d in diag.iter() {
        let a = d.modulus();
        lo = lo.min(a);
        hi = hi.max(a);
    }
    let rcond = if hi > R::zero() { lo / hi } else { R::zero() };
    if !(rcond > R::default_epsilon()) {
        return Err(Error::Singular {
            condition_estimate: 1.0 / rcond.to_f64_lossy(),
        });
    }
    let rhs = v.transpose() * &y;
    let w = lu.solve(&rhs).ok_or(Error::Singular {
        condition_estimate: f64::INFINITY,
    })?;
    let x = y - lu_inv_u * w;
    Ok(x.column(0).into_owned())
}

/// `𝒜 = L + U Vᵀ` with `L = G_0⊗K_0`, `U = [U_1⊗K_1 | …]`, `V = [V_1⊗I | …]`
/// and `G_i = U_i V_iᵀ` from an SVD at numerical rank.
#[derive(Debug, Clone)]
pub struct Splitting<R: Real> {
    pub l: KronOperator<R>,
    pub u: DMatrix<Cx<R>>,
    pub v: DMatrix<Cx<R>>,
    /// Numerical rank of each `G_i`, `i ≥ 1`.
    pub g_ranks: Vec<usize>,
}

/// Default limit on `J·Q_s` for the dense existence-theory checks.
pub const SPLITTING_LIMIT: usize = 4096;

pub fn split_operator<R: Real>(op: &KronOperator<R>) -> Result<Splitting<R>> {
    if op.size() > SPLITTING_LIMIT {
        return Err(Error::SizeLimit {
            context: "low-rank splitting",
            size: op.size(),
            limit: SPLITTING_LIMIT,
        });
    }
    let (j, qs) = (op.spatial_dim(), op.stochastic_dim());
    let l = KronOperator::new(vec![op.g()[0].clone()], vec![op.k()[0].clone()])?;
    let eye_j = DMatrix::<Cx<R>>::identity(j, j);
    let mut us = Vec::new();
    let mut vs = Vec::new();
    let mut g_ranks = Vec::new();
    for (g, k) in op.g().iter().zip(op.k()).skip(1) {
        let gd: DMatrix<R> = g.to_dense();
        let svd = gd.svd(true, true);
        let w = svd.u.expect("left singular vectors");
        let vt = svd.v_t.expect("right singular vectors");
        let smax = svd.singular_values.iter().fold(R::zero(), |a, &b| a.max(b));
        let cut = smax * R::from_count(qs) * R::default_epsilon();
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&c| svd.singular_values[c] > cut)
            .collect();
        g_ranks.push(keep.len());
        let ui = DMatrix::from_fn(qs, keep.len(), |r, c| cre(w[(r, keep[c])] * svd.singular_values[keep[c]]));
        let vi = DMatrix::from_fn(qs, keep.len(), |r, c| cre(vt[(keep[c], r)]));
        us.push(ui.kronecker(&k.to_dense()));
        vs.push(vi.kronecker(&eye_j));
    }
    let m: usize = us.iter().map(|u| u.ncols()).sum();
    let mut u = DMatrix::zeros(j * qs, m);
    let mut v = DMatrix::zeros(j * qs, m);
    let mut c = 0;
    for (ui, vi) in us.iter().zip(&vs) {
        u.columns_mut(c, ui.ncols()).copy_from(ui);
        v.columns_mut(c, vi.ncols()).copy_from(vi);
        c += ui.ncols();
    }
    Ok(Splitting { l, u, v, g_ranks })
}

fn l_solver_dense<R: Real>(
    l: &KronOperator<R>,
    k0_inv: &DMatrix<Cx<R>>,
) -> impl Fn(&DMatrix<Cx<R>>) -> Result<DMatrix<Cx<R>>> {
    let (j, qs) = (l.spatial_dim(), l.stochastic_dim());
    let g0: Vec<R> = (0..qs).map(|a| l.g()[0].get(a, a)).collect();
    let k0_inv = k0_inv.clone();
    move |b: &DMatrix<Cx<R>>| {
        if b.nrows() != j * qs {
            return Err(dim_mismatch("L solve", j * qs, b.nrows()));
        }
        let mut out = DMatrix::zeros(b.nrows(), b.ncols());
        for c in 0..b.ncols() {
            let bm = DMatrix::from_column_slice(j, qs, b.column(c).as_slice());
            let mut xm = &k0_inv * bm;
            for (a, s) in g0.iter().enumerate() {
                xm.column_mut(a).scale_mut(R::one() / *s);
            }
            out.column_mut(c).copy_from_slice(xm.as_slice());
        }
        Ok(out)
    }
}

fn check_diagonal_g0<R: Real>(op: &KronOperator<R>) -> Result<()> {
    if op.g()[0].triplets().any(|(a, b, v)| a != b && v != R::zero()) {
        return Err(Error::InvalidParameter("splitting needs a diagonal G_0".into()));
    }
    Ok(())
}

/// Relative error of the SMW solution with exact `L` solves.
pub fn splitting_exact_error<R: Real>(op: &KronOperator<R>, b: &DVector<Cx<R>>) -> Result<f64> {
    check_diagonal_g0(op)?;
    let dec = split_operator(op)?;
    let k0 = op.k()[0].to_dense();
    let k0_inv = k0.try_inverse().ok_or(Error::Singular {
        condition_estimate: f64::INFINITY,
    })?;
    let x = smw_solve(l_solver_dense(&dec.l, &k0_inv), &dec.u, &dec.v, b)?;
    relative_error_vs_direct(op, b, &x)
}

fn relative_error_vs_direct<R: Real>(op: &KronOperator<R>, b: &DVector<Cx<R>>, x: &DVector<Cx<R>>) -> Result<f64> {
    let a = op.assemble_full(SPLITTING_LIMIT)?;
    let exact = crate::krylov::direct_solve(&a, b, SPLITTING_LIMIT)?;
    let denom = exact.norm();
    Ok(if denom > R::zero() {
        ((x - &exact).norm() / denom).to_f64_lossy()
    } else {
        x.norm().to_f64_lossy()
    })
}

/// One row of the error-decay table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPoint {
    pub k: usize,
    pub error: f64,
}

/// Relative error of `ũ` from SMW with every `L` solve replaced by the
/// sinc quadrature with `k` nodes per side, one entry per `k`.
pub fn splitting_quadrature_error<R: Real>(op: &KronOperator<R>, b: &DVector<Cx<R>>, k_list: &[usize]) -> Result<(Vec<DecayPoint>, Rotation)> {
    check_diagonal_g0(op)?;
    let dec = split_operator(op)?;
    let k0 = op.k()[0].to_dense();
    let eigs = eigenvalues(&k0)?;
    let rotation = admissible_rotation(std::slice::from_ref(&k0))?;
    let mu = match rotation {
        Rotation::None => eigs.iter().map(|e| e.re).fold(eigs[0].re, |a, b| a.min(b)),
        Rotation::MinusI => {
            StripSpectrumInfo::from_eigenvalues(&eigs)
                .expect("non-empty spectrum")
                .mu_min
        }
    };
    let mut out = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let rule = SincRule::new(k)?;
        let (k0_inv, _) = quadrature_inverse_matrix(&k0, &rule, mu)?;
        let x = smw_solve(l_solver_dense(&dec.l, &k0_inv), &dec.u, &dec.v, b)?;
        out.push(DecayPoint {
            k,
            error: relative_error_vs_direct(op, b, &x)?,
        });
    }
    Ok((out, rotation))
}

/// Least-squares slope of `ln(error)` against `√k`.
pub fn decay_slope(points: &[DecayPoint]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.k as f64).sqrt()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.error.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 || !sxy.is_finite() {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Writes the decay table as CSV with header `k,error`.
pub fn write_decay_csv<W: Write>(out: &mut W, points: &[DecayPoint]) -> std::io::Result<()> {
    writeln!(out, "k,error")?;
    for p in points {
        writeln!(out, "{},{:.17e}", p.k, p.error)?;
    }
    Ok(())
}

/// `(n+1)²·tridiag(-1, 2, -1)`, the scaled 1D Dirichlet Laplacian.
pub fn laplacian_1d<R: Real>(n: usize) -> DMatrix<Cx<R>> {
    let s = R::from_count((n + 1) * (n + 1));
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            cre(R::lit(2.0) * s)
        } else if i.abs_diff(j) == 1 {
            cre(-s)
        } else {
            czero()
        }
    })
}

/// Smallest eigenvalue of [`laplacian_1d`], `4(n+1)² sin²(π/(2(n+1)))`.
pub fn laplacian_1d_min_eigenvalue<R: Real>(n: usize) -> R {
    let m = R::from_count(n + 1);
    let s = (R::pi() / (R::lit(2.0) * m)).sin();
    R::lit(4.0) * m * m * s * s
}

/// Decay table for the Kronecker sum `T ⊗ I + I ⊗ T` with `T` the
/// [`laplacian_1d`] of size `n`, against a dense direct solve.
///
/// `μ` is twice the smallest eigenvalue of `T`, the smallest eigenvalue of the sum.
pub fn two_factor_decay<R: Real>(n: usize, k_list: &[usize]) -> Result<Vec<DecayPoint>> {
    if n == 0 || n * n > SPLITTING_LIMIT {
        return Err(Error::SizeLimit {
            context: "two-factor decay problem",
            size: n * n,
            limit: SPLITTING_LIMIT,
        });
    }
    let a = laplacian_1d::<R>(n);
    let mu = R::lit(2.0) * laplacian_1d_min_eigenvalue::<R>(n);
    let b = DVector::from_fn(n, |i, _| cre(R::one() + (R::lit(0.3) * R::from_count(i)).sin()));
    let eye = DMatrix::<Cx<R>>::identity(n, n);
    let sum = a.kronecker(&eye) + eye.kronecker(&a);
    let exact = sum.lu().solve(&b.kronecker(&b)).ok_or(Error::Singular {
        condition_estimate: f64::INFINITY,
    })?;
    let norm = exact.norm();
    k_list
        .iter()
        .map(|&k| {
            let rule = SincRule::new(k)?;
            let q = quadrature_inverse_action(&[a.clone(), a.clone()], &[b.clone(), b.clone()], &rule, mu)?;
            Ok(DecayPoint {
                k,
                error: ((q.x - &exact).norm() / norm).to_f64_lossy(),
            })
        })
        .collect()
}
