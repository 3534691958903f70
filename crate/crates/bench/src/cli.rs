//! Command-line interface.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use sghelm::existence::{decay_slope, two_factor_decay, splitting_quadrature_error, splitting_exact_error, write_decay_csv};
use sghelm::fem::{spectrum, write_spectrum_csv, AssemblyOptions, HelmholtzMatrices, TriMesh, DENSE_EIGEN_LIMIT};
use sghelm::field::KlExpansion;
use sghelm::problem::Problem;

use crate::config::{parse_sweep, ProblemConfig};
use crate::error::BenchError;
use crate::report::{pretty, write_csv};
use crate::run::{run_case, CaseReport};

#[derive(Debug, Parser)]
#[command(name = "sghelm", version, about = "Low-rank stochastic Galerkin Helmholtz solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one case.
    Solve {
        #[command(flatten)]
        case: CaseArgs,
        /// Print an aligned table instead of CSV.
        #[arg(long)]
        pretty: bool,
    },
    /// Run every case of a sweep file.
    Bench {
        /// One case per line, given as `key=value` overrides.
        #[arg(long)]
        sweep: PathBuf,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        pretty: bool,
    },
    /// Eigenvalues of the mean matrix K_0 as `re,im` CSV.
    Spectrum {
        #[command(flatten)]
        case: CaseArgs,
        /// Largest matrix handed to the dense eigensolver.
        #[arg(long, default_value_t = DENSE_EIGEN_LIMIT)]
        eig_limit: usize,
    },
    /// Sinc-quadrature error decay on the two-factor Laplacian test problem.
    VerifyExistence {
        /// Size of each 1D factor.
        #[arg(long, default_value_t = 16)]
        factor_size: usize,
        /// Comma-separated quadrature parameters.
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 9, 16, 25, 36])]
        k: Vec<usize>,
        /// Also run the splitting test on the configured problem.
        #[arg(long)]
        splitting: bool,
        #[command(flatten)]
        case: CaseArgs,
    },
}

/// Problem options shared by all subcommands. Each flag overrides the
/// corresponding key of `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct CaseArgs {
    /// `key=value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "N")]
    pub n: Option<String>,
    #[arg(long = "Q")]
    pub q: Option<String>,
    #[arg(long = "Np")]
    pub np: Option<String>,
    /// Wave number.
    #[arg(long, conflicts_with = "c_pi", allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Wave number as a multiple of π.
    #[arg(long = "c-pi", allow_hyphen_values = true)]
    pub c_pi: Option<String>,
    #[arg(long = "alpha-bar")]
    pub alpha_bar: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub l: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long = "eps-rel")]
    pub eps_rel: Option<String>,
    #[arg(long = "max-it")]
    pub max_it: Option<String>,
    /// lowrank, full, both or direct.
    #[arg(long)]
    pub solver: Option<String>,
    /// Comma-separated subset of left, right, bottom, top.
    #[arg(long = "dirichlet-edges")]
    pub dirichlet_edges: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// factored or dense.
    #[arg(long)]
    pub matvec: Option<String>,
    /// banded or dense-inverse.
    #[arg(long)]
    pub precond: Option<String>,
    /// mid-edge or gauss:<n>.
    #[arg(long)]
    pub quadrature: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub output: Option<String>,
}

impl CaseArgs {
    pub fn resolve(&self) -> Result<ProblemConfig, BenchError> {
        let mut cfg = ProblemConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        let flags = [
            ("N", &self.n),
            ("Q", &self.q),
            ("Np", &self.np),
            ("c", &self.c),
            ("c_pi", &self.c_pi),
            ("alpha_bar", &self.alpha_bar),
            ("sigma", &self.sigma),
            ("l", &self.l),
            ("f", &self.f),
            ("g", &self.g),
            ("tol", &self.tol),
            ("eps_rel", &self.eps_rel),
            ("max_it", &self.max_it),
            ("solver", &self.solver),
            ("dirichlet_edges", &self.dirichlet_edges),
            ("seed", &self.seed),
            ("matvec", &self.matvec),
            ("precond", &self.precond),
            ("quadrature", &self.quadrature),
            ("output", &self.output),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn sink(cfg: &ProblemConfig) -> Result<Box<dyn Write>, BenchError> {
    Ok(match &cfg.output {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(cfg: &ProblemConfig, reports: &[CaseReport], as_table: bool) -> Result<i32, BenchError> {
    let mut out = sink(cfg)?;
    if as_table {
        out.write_all(pretty(reports).as_bytes())?;
    } else {
        write_csv(&mut out, reports)?;
    }
    out.flush()?;
    Ok(if reports.iter().all(CaseReport::all_converged) { 0 } else { 1 })
}

fn run_spectrum(case: &CaseArgs, eig_limit: usize) -> Result<i32, BenchError> {
    let cfg = case.resolve()?;
    let spec = cfg.spec();
    let kle = KlExpansion::new(spec.n_kle, spec.corr_len, spec.std_dev, spec.mean)?;
    let mesh = TriMesh::new(spec.np, &spec.dirichlet)?;
    let opts = AssemblyOptions {
        quadrature: spec.quadrature,
        element_modifier: None,
    };
    let mats = HelmholtzMatrices::assemble(&mesh, &kle, spec.wave_number, &opts)?;
    let eigs = spectrum(mats.k0(), eig_limit)?;
    let mut out = sink(&cfg)?;
    write_spectrum_csv(&mut out, &eigs)?;
    out.flush()?;
    Ok(0)
}

fn run_existence(n: usize, k: &[usize], splitting: bool, case: &CaseArgs) -> Result<i32, BenchError> {
    let cfg = case.resolve()?;
    if k.is_empty() {
        return Err(BenchError::Config("--k needs at least one value".into()));
    }
    let points = two_factor_decay::<f64>(n, k)?;
    let mut out = sink(&cfg)?;
    write_decay_csv(&mut out, &points)?;
    out.flush()?;
    if let Some(s) = decay_slope(&points) {
        eprintln!("two-factor decay: slope {s:.4} ({:.3} pi)", s / std::f64::consts::PI);
    }
    if splitting {
        let problem = Problem::assemble(&cfg.spec())?;
        let b = problem.rhs.to_vec();
        let exact = splitting_exact_error(&problem.operator, &b)?;
        let (approx, rotation) = splitting_quadrature_error(&problem.operator, &b, k)?;
        eprintln!("splitting with exact L solves: relative error {exact:.3e}");
        eprintln!("splitting with quadrature L solves (rotation {}):", rotation.name());
        for p in approx {
            eprintln!("  k={:>3} error={:.3e}", p.k, p.error);
        }
    }
    Ok(0)
}

fn run_bench(sweep: &PathBuf, jobs: usize, case: &CaseArgs, as_table: bool) -> Result<i32, BenchError> {
    let base = case.resolve()?;
    let text = fs::read_to_string(sweep)
        .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", sweep.display())))?;
    let cases = parse_sweep(&text, &base)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;
    let reports = pool.install(|| cases.par_iter().map(run_case).collect::<Result<Vec<_>, _>>())?;
    emit(&base, &reports, as_table)
}

pub fn execute(cli: Cli) -> Result<i32, BenchError> {
    match cli.command {
        Command::Solve { case, pretty } => {
            let cfg = case.resolve()?;
            let report = run_case(&cfg)?;
            emit(&cfg, std::slice::from_ref(&report), pretty)
        }
        Command::Bench {
            sweep,
            jobs,
            case,
            pretty,
        } => run_bench(&sweep, jobs, &case, pretty),
        Command::Spectrum { case, eig_limit } => run_spectrum(&case, eig_limit),
        Command::VerifyExistence {
            factor_size,
            k,
            splitting,
            case,
        } => run_existence(factor_size, &k, splitting, &case),
    }
}

/// Parses `argv` and runs it, returning the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
