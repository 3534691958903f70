//! Preconditioned BiCG in low-rank and full-vector form, and a dense direct
//! solve used as a reference.

use std::time::{Duration, Instant};

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{dim_mismatch, Error, Result};
use crate::lowrank::LowRankFactor;
use crate::operator::{KronOperator, MeanPreconditioner};
use crate::scalar::{Cx, Real};
use crate::sparse::CsrMatrix;

/// Relative threshold below which `ρ` or `⟨P̃, Q⟩` count as a breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// Default limit on the dimension accepted by [`direct_solve`].
pub const DIRECT_SOLVE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop when `‖R_k‖_F ≤ tol·‖B‖_F`.
    pub tol: f64,
    /// Truncation accuracy of the low-rank solver.
    pub eps_rel: f64,
    pub max_it: usize,
    pub record_timings: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            eps_rel: 1e-6,
            max_it: 500,
            record_timings: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.eps_rel >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps_rel must be non-negative, got {}",
                self.eps_rel
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakdownKind {
    /// `ρ = ⟨R̃, Z⟩` vanished.
    Rho,
    /// `⟨P̃, 𝒜P⟩` vanished.
    Curvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Breakdown { kind: BreakdownKind, iteration: usize },
}

/// Fractions of the total solve time spent in each operation class.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TimeShares {
    pub preconditioner: f64,
    pub truncation: f64,
    pub trace: f64,
    pub matvec: f64,
    pub other: f64,
}

impl TimeShares {
    /// Sum of the four instrumented classes.
    pub fn instrumented(&self) -> f64 {
        self.preconditioner + self.truncation + self.trace + self.matvec
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    pub status: SolveStatus,
    /// `‖R_k‖_F` after each iteration.
    pub residual_history: Vec<f64>,
    /// Rank of `X_k` after each iteration (low-rank solver only).
    pub rank_history: Vec<usize>,
    /// Mean of `rank_history`; `None` for the full-vector solver.
    pub avg_rank: Option<f64>,
    pub time_shares: TimeShares,
    pub nnz_operator: usize,
    pub nnz_preconditioner: usize,
    pub total_time: Duration,
}

#[derive(Default)]
struct Clock {
    enabled: bool,
    precond: Duration,
    trunc: Duration,
    trace: Duration,
    matvec: Duration,
}

#[derive(Clone, Copy)]
enum Class {
    Precond,
    Trunc,
    Trace,
    Matvec,
}

impl Clock {
    fn time<T>(&mut self, class: Class, f: impl FnOnce() -> T) -> T {
        if !self.enabled {
            return f();
        }
        let t0 = Instant::now();
        let out = f();
        let dt = t0.elapsed();
        match class {
            Class::Precond => self.precond += dt,
            Class::Trunc => self.trunc += dt,
            Class::Trace => self.trace += dt,
            Class::Matvec => self.matvec += dt,
        }
        out
    }

    fn shares(&self, total: Duration) -> TimeShares {
        let t = total.as_secs_f64();
        if !self.enabled || t == 0.0 {
            return TimeShares::default();
        }
        let f = |d: Duration| (d.as_secs_f64() / t).min(1.0);
        let mut s = TimeShares {
            preconditioner: f(self.precond),
            truncation: f(self.trunc),
            trace: f(self.trace),
            matvec: f(self.matvec),
            other: 0.0,
        };
        s.other = (1.0 - s.instrumented()).max(0.0);
        s
    }
}

fn is_breakdown<R: Real>(value: Cx<R>, scale: f64) -> bool {
    let m = value.modulus().to_f64_lossy();
    !(m > BREAKDOWN_TOL * scale)
}

struct Finish {
    iterations: usize,
    status: SolveStatus,
    residuals: Vec<f64>,
    ranks: Vec<usize>,
    low_rank: bool,
    nnz_operator: usize,
    nnz_preconditioner: usize,
}

fn report(f: Finish, clock: &Clock, start: Instant) -> SolveReport {
    let total = start.elapsed();
    let avg_rank = if f.low_rank {
        Some(if f.ranks.is_empty() {
            0.0
        } else {
            f.ranks.iter().sum::<usize>() as f64 / f.ranks.len() as f64
        })
    } else {
        None
    };
    SolveReport {
        iterations: f.iterations,
        converged: f.status == SolveStatus::Converged,
        status: f.status,
        residual_history: f.residuals,
        rank_history: f.ranks,
        avg_rank,
        time_shares: clock.shares(total),
        nnz_operator: f.nnz_operator,
        nnz_preconditioner: f.nnz_preconditioner,
        total_time: total,
    }
}

/// Preconditioned low-rank BiCG. Every iterate lives in factored form and
/// is truncated to relative accuracy `cfg.eps_rel` after each update.
pub fn plr_bicg<R: Real>(
    op: &KronOperator<R>,
    m: &MeanPreconditioner<R>,
    b: &LowRankFactor<R>,
    cfg: &SolverConfig,
) -> Result<(LowRankFactor<R>, SolveReport)> {
    cfg.validate()?;
    let (j, qs) = (op.spatial_dim(), op.stochastic_dim());
    if b.rows() != j || b.cols() != qs {
        return Err(dim_mismatch("right-hand side", format!("{j}x{qs}"), format!("{}x{}", b.rows(), b.cols())));
    }
    let start = Instant::now();
    let mut clock = Clock {
        enabled: cfg.record_timings,
        ..Clock::default()
    };
    let eps = R::lit(cfg.eps_rel);
    let tol = cfg.tol;
    let mut fin = Finish {
        iterations: 0,
        status: SolveStatus::MaxIterations,
        residuals: Vec::new(),
        ranks: Vec::new(),
        low_rank: true,
        nnz_operator: op.factor_nnz(),
        nnz_preconditioner: m.nnz(),
    };

    let mut x = LowRankFactor::zeros(j, qs);
    let norm_b = b.frob_norm().to_f64_lossy();
    if norm_b == 0.0 {
        fin.status = SolveStatus::Converged;
        return Ok((x, report(fin, &clock, start)));
    }
    let mut r = b.clone();
    let mut rt = b.clone();
    let mut p = LowRankFactor::zeros(j, qs);
    let mut pt = LowRankFactor::zeros(j, qs);
    let mut rho_prev = Cx::<R>::new(R::zero(), R::zero());

    for k in 0..cfg.max_it {
        let z = clock.time(Class::Precond, || m.apply(&r, false))?;
        let zt = clock.time(Class::Precond, || m.apply(&rt, true))?;
        let (rho, scale) = clock.time(Class::Trace, || -> Result<_> {
            Ok((z.inner(&rt)?, (z.frob_norm() * rt.frob_norm()).to_f64_lossy()))
        })?;
        if is_breakdown(rho, scale) {
            fin.status = SolveStatus::Breakdown {
                kind: BreakdownKind::Rho,
                iteration: k,
            };
            break;
        }
        if k == 0 {
            p = z;
            pt = zt;
        } else {
            let beta = rho / rho_prev;
            let np = z.axpy(beta, &p)?;
            let npt = zt.axpy(beta.conj(), &pt)?;
            p = clock.time(Class::Trunc, || np.truncate(eps));
            pt = clock.time(Class::Trunc, || npt.truncate(eps));
        }
        let q = clock.time(Class::Matvec, || op.apply(&p))?;
        let qt = clock.time(Class::Matvec, || op.apply_adjoint(&pt))?;
        let (ptq, scale) = clock.time(Class::Trace, || -> Result<_> {
            Ok((q.inner(&pt)?, (q.frob_norm() * pt.frob_norm()).to_f64_lossy()))
        })?;
        if is_breakdown(ptq, scale) {
            fin.status = SolveStatus::Breakdown {
                kind: BreakdownKind::Curvature,
                iteration: k,
            };
            break;
        }
        let alpha = rho / ptq;
        let nx = x.axpy(alpha, &p)?;
        let nr = r.axpy(-alpha, &q)?;
        let nrt = rt.axpy(-alpha.conj(), &qt)?;
        x = clock.time(Class::Trunc, || nx.truncate(eps));
        r = clock.time(Class::Trunc, || nr.truncate(eps));
        rt = clock.time(Class::Trunc, || nrt.truncate(eps));
        let res = clock.time(Class::Trace, || r.frob_norm()).to_f64_lossy();
        fin.iterations = k + 1;
        fin.residuals.push(res);
        fin.ranks.push(x.rank());
        if res <= tol * norm_b {
            fin.status = SolveStatus::Converged;
            break;
        }
        rho_prev = rho;
    }
    Ok((x, report(fin, &clock, start)))
}

/// Textbook preconditioned complex BiCG on an explicitly assembled matrix.
pub fn p_bicg_full<R: Real>(
    a: &CsrMatrix<Cx<R>>,
    m: &MeanPreconditioner<R>,
    b: &DVector<Cx<R>>,
    cfg: &SolverConfig,
) -> Result<(DVector<Cx<R>>, SolveReport)> {
    cfg.validate()?;
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(dim_mismatch("full BiCG", n, b.len()));
    }
    let start = Instant::now();
    let mut clock = Clock {
        enabled: cfg.record_timings,
        ..Clock::default()
    };
    let mut fin = Finish {
        iterations: 0,
        status: SolveStatus::MaxIterations,
        residuals: Vec::new(),
        ranks: Vec::new(),
        low_rank: false,
        nnz_operator: a.nnz(),
        nnz_preconditioner: m.nnz(),
    };
    let mut x = DVector::zeros(n);
    let norm_b = b.norm().to_f64_lossy();
    if norm_b == 0.0 {
        fin.status = SolveStatus::Converged;
        return Ok((x, report(fin, &clock, start)));
    }
    let mut r = b.clone();
    let mut rt = b.clone();
    let mut p = DVector::zeros(n);
    let mut pt = DVector::zeros(n);
    let mut rho_prev = Cx::<R>::new(R::zero(), R::zero());

    for k in 0..cfg.max_it {
        let z = clock.time(Class::Precond, || m.apply_full(&r, false))?;
        let zt = clock.time(Class::Precond, || m.apply_full(&rt, true))?;
        let (rho, scale) = clock.time(Class::Trace, || (rt.dotc(&z), (z.norm() * rt.norm()).to_f64_lossy()));
        if is_breakdown(rho, scale) {
            fin.status = SolveStatus::Breakdown {
                kind: BreakdownKind::Rho,
                iteration: k,
            };
            break;
        }
        if k == 0 {
            p = z;
            pt = zt;
        } else {
            let beta = rho / rho_prev;
            p = z + p * beta;
            pt = zt + pt * beta.conj();
        }
        let q = clock.time(Class::Matvec, || a.mul_vec(&p))?;
        let qt = clock.time(Class::Matvec, || a.adjoint_mul_vec(&pt))?;
        let (ptq, scale) = clock.time(Class::Trace, || (pt.dotc(&q), (q.norm() * pt.norm()).to_f64_lossy()));
        if is_breakdown(ptq, scale) {
            fin.status = SolveStatus::Breakdown {
                kind: BreakdownKind::Curvature,
                iteration: k,
            };
            break;
        }
        let alpha = rho / ptq;
        x += &p * alpha;
        r -= &q * alpha;
        rt -= &qt * alpha.conj();
        let res = clock.time(Class::Trace, || r.norm()).to_f64_lossy();
        fin.iterations = k + 1;
        fin.residuals.push(res);
        if res <= cfg.tol * norm_b {
            fin.status = SolveStatus::Converged;
            break;
        }
        rho_prev = rho;
    }
    Ok((x, report(fin, &clock, start)))
}

/// Dense LU solve of `A x = b` for `dim(A) ≤ limit`.
pub fn direct_solve<R: Real>(a: &CsrMatrix<Cx<R>>, b: &DVector<Cx<R>>, limit: usize) -> Result<DVector<Cx<R>>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(dim_mismatch("direct solve", n, b.len()));
    }
    if n > limit {
        return Err(Error::SizeLimit {
            context: "dense direct solve",
            size: n,
            limit,
        });
    }
    let dense: DMatrix<Cx<R>> = a.to_dense();
    let lu = dense.lu();
    lu.solve(b).ok_or(Error::Singular {
        condition_estimate: f64::INFINITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::PrecondStorage;
    use crate::scalar::cx;

    type C = Cx<f64>;

    #[test]
    fn identity_converges_in_one_step() {
        let g0 = CsrMatrix::<f64>::identity(3);
        let k0 = CsrMatrix::<C>::identity(4);
        let op = KronOperator::new(vec![g0.clone()], vec![k0.clone()]).unwrap();
        let m = MeanPreconditioner::prepare(&k0, &g0, PrecondStorage::BandedLu).unwrap();
        let b = LowRankFactor::outer(
            DVector::from_fn(4, |i, _| cx(1.0 + i as f64, 0.5)),
            DVector::from_fn(3, |i, _| cx(1.0, i as f64)),
        );
        let (x, rep) = plr_bicg(&op, &m, &b, &SolverConfig::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        assert!((x.to_dense() - b.to_dense()).norm() < 1e-14);
        assert_eq!(rep.avg_rank, Some(1.0));

        let a = op.assemble_full(100).unwrap();
        let (xf, rf) = p_bicg_full(&a, &m, &b.to_vec(), &SolverConfig::default()).unwrap();
        assert_eq!(rf.iterations, 1);
        assert!((xf - b.to_vec()).norm() < 1e-14);
        assert_eq!(rf.avg_rank, None);
    }

    #[test]
    fn zero_rhs_returns_immediately() {
        let g0 = CsrMatrix::<f64>::identity(2);
        let k0 = CsrMatrix::<C>::identity(2);
        let op = KronOperator::new(vec![g0.clone()], vec![k0.clone()]).unwrap();
        let m = MeanPreconditioner::prepare(&k0, &g0, PrecondStorage::BandedLu).unwrap();
        let (x, rep) = plr_bicg(&op, &m, &LowRankFactor::zeros(2, 2), &SolverConfig::default()).unwrap();
        assert_eq!(x.rank(), 0);
        assert_eq!(rep.iterations, 0);
        assert!(rep.converged);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = SolverConfig {
            tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig {
            eps_rel: -1.0,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn direct_solve_simple_cases() {
        let d = CsrMatrix::from_triplets(3, 3, &[(0, 0, cx(2.0, 0.0)), (1, 1, cx(0.0, 4.0)), (2, 2, cx(-1.0, 0.0))]);
        let b = DVector::from_vec(vec![cx(2.0, 0.0), cx(4.0, 0.0), cx(3.0, 1.0)]);
        let x = direct_solve(&d, &b, 10).unwrap();
        assert!((x[0] - cx(1.0, 0.0)).norm() < 1e-15);
        assert!((x[1] - cx(0.0, -1.0)).norm() < 1e-15);
        assert!((x[2] - cx(-3.0, -1.0)).norm() < 1e-15);
        assert!(direct_solve(&d, &b, 2).is_err());
        let i = CsrMatrix::<C>::identity(3);
        assert_eq!(direct_solve(&i, &b, 10).unwrap(), b);
    }
}
