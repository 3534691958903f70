//! Running one configured case through the selected solvers.

use std::time::Instant;

use nalgebra::DVector;
use sghelm::krylov::{direct_solve, p_bicg_full, plr_bicg, SolveReport, SolveStatus, TimeShares, DIRECT_SOLVE_LIMIT};
use sghelm::operator::FULL_ASSEMBLY_LIMIT;
use sghelm::problem::Problem;
use sghelm::Complex64;

use crate::config::{ProblemConfig, SolverChoice};
use crate::error::BenchError;

/// Which solver produced a [`SolverRun`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    LowRank,
    Full,
    Direct,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::LowRank => "lowrank",
            SolverKind::Full => "full",
            SolverKind::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverRun {
    pub solver: SolverKind,
    pub report: SolveReport,
}

#[derive(Debug, Clone)]
pub struct CaseReport {
    pub config: ProblemConfig,
    pub runs: Vec<SolverRun>,
    /// `J·Q_s`.
    pub size_a: usize,
    /// Relative 2-norm difference between the first two solutions.
    pub discrepancy: Option<f64>,
}

impl CaseReport {
    pub fn all_converged(&self) -> bool {
        self.runs.iter().all(|r| r.report.converged)
    }
}

fn solvers(choice: SolverChoice) -> &'static [SolverKind] {
    match choice {
        SolverChoice::LowRank => &[SolverKind::LowRank],
        SolverChoice::Full => &[SolverKind::Full],
        SolverChoice::Both => &[SolverKind::LowRank, SolverKind::Full],
        SolverChoice::Direct => &[SolverKind::Direct],
    }
}

pub fn run_case(cfg: &ProblemConfig) -> Result<CaseReport, BenchError> {
    cfg.validate()?;
    let problem = Problem::assemble(&cfg.spec())?;
    let m = problem.preconditioner(cfg.precond)?;
    let scfg = cfg.solver_config();
    let b = problem.rhs.to_vec();

    let mut runs = Vec::new();
    let mut solutions: Vec<DVector<Complex64>> = Vec::new();
    let mut full = None;
    for &kind in solvers(cfg.solver) {
        let (x, report) = match kind {
            SolverKind::LowRank => {
                let (x, r) = plr_bicg(&problem.operator, &m, &problem.rhs, &scfg)?;
                (x.to_vec(), r)
            }
            SolverKind::Full => {
                let a = full.get_or_insert(problem.operator.assemble_full(FULL_ASSEMBLY_LIMIT)?);
                p_bicg_full(a, &m, &b, &scfg)?
            }
            SolverKind::Direct => {
                let start = Instant::now();
                let a = full.get_or_insert(problem.operator.assemble_full(FULL_ASSEMBLY_LIMIT)?);
                let x = direct_solve(a, &b, DIRECT_SOLVE_LIMIT)?;
                let report = SolveReport {
                    iterations: 0,
                    converged: true,
                    status: SolveStatus::Converged,
                    residual_history: Vec::new(),
                    rank_history: Vec::new(),
                    avg_rank: None,
                    time_shares: TimeShares::default(),
                    nnz_operator: a.nnz(),
                    nnz_preconditioner: 0,
                    total_time: start.elapsed(),
                };
                (x, report)
            }
        };
        solutions.push(x);
        runs.push(SolverRun { solver: kind, report });
    }

    let discrepancy = match solutions.as_slice() {
        [x, y, ..] => {
            let d = y.norm();
            Some(if d > 0.0 { (x - y).norm() / d } else { x.norm() })
        }
        _ => None,
    };
    Ok(CaseReport {
        config: cfg.clone(),
        runs,
        size_a: problem.operator.size(),
        discrepancy,
    })
}
