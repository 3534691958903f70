//! Problem configuration: defaults, `key=value` files and overrides.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use sghelm::fem::{CoefficientQuadrature, Side};
use sghelm::operator::{MatvecMode, PrecondStorage};
use sghelm::problem::ProblemSpec;

use crate::error::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    LowRank,
    Full,
    Both,
    Direct,
}

impl SolverChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lowrank" => Some(Self::LowRank),
            "full" => Some(Self::Full),
            "both" => Some(Self::Both),
            "direct" => Some(Self::Direct),
            _ => None,
        }
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::LowRank => "lowrank",
            Self::Full => "full",
            Self::Both => "both",
            Self::Direct => "direct",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub n: usize,
    pub q: usize,
    pub np: usize,
    /// Wave number `c`.
    pub c: f64,
    pub alpha_bar: f64,
    pub sigma: f64,
    pub l: f64,
    pub f: f64,
    pub g: f64,
    pub tol: f64,
    pub eps_rel: f64,
    pub max_it: usize,
    pub solver: SolverChoice,
    pub dirichlet_edges: BTreeSet<Side>,
    pub seed: u64,
    pub matvec: MatvecMode,
    pub precond: PrecondStorage,
    pub quadrature: CoefficientQuadrature,
    pub output: Option<PathBuf>,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            n: 4,
            q: 3,
            np: 11,
            c: 0.0,
            alpha_bar: 5.0,
            sigma: 1.0,
            l: 1.0,
            f: 0.0,
            g: 0.1,
            tol: 1e-4,
            eps_rel: 1e-6,
            max_it: 500,
            solver: SolverChoice::LowRank,
            dirichlet_edges: BTreeSet::from([Side::Left]),
            seed: 0,
            matvec: MatvecMode::Factored,
            precond: PrecondStorage::BandedLu,
            quadrature: CoefficientQuadrature::MidEdge,
            output: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "N",
    "Q",
    "Np",
    "c",
    "c_pi",
    "alpha_bar",
    "sigma",
    "l",
    "f",
    "g",
    "tol",
    "eps_rel",
    "max_it",
    "solver",
    "dirichlet_edges",
    "seed",
    "matvec",
    "precond",
    "quadrature",
    "output",
];

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, BenchError> {
    value
        .trim()
        .parse()
        .map_err(|_| BenchError::Config(format!("invalid value `{value}` for `{key}`")))
}

impl ProblemConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), BenchError> {
        let v = value.trim();
        match key {
            "N" => self.n = num(key, v)?,
            "Q" => self.q = num(key, v)?,
            "Np" => self.np = num(key, v)?,
            "c" => self.c = num(key, v)?,
            "c_pi" => self.c = num::<f64>(key, v)? * PI,
            "alpha_bar" => self.alpha_bar = num(key, v)?,
            "sigma" => self.sigma = num(key, v)?,
            "l" => self.l = num(key, v)?,
            "f" => self.f = num(key, v)?,
            "g" => self.g = num(key, v)?,
            "tol" => self.tol = num(key, v)?,
            "eps_rel" => self.eps_rel = num(key, v)?,
            "max_it" => self.max_it = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "solver" => {
                self.solver = SolverChoice::parse(v)
                    .ok_or_else(|| BenchError::Config(format!("unknown solver `{v}` (lowrank, full, both, direct)")))?
            }
            "dirichlet_edges" => {
                let mut set = BTreeSet::new();
                for part in v.split(',').map(str::trim).filter(|p| !p.is_empty() && *p != "none") {
                    set.insert(
                        Side::parse(part).ok_or_else(|| BenchError::Config(format!("unknown edge `{part}`")))?,
                    );
                }
                self.dirichlet_edges = set;
            }
            "matvec" => {
                self.matvec = match v {
                    "factored" => MatvecMode::Factored,
                    "dense" => MatvecMode::DenseAccumulate,
                    _ => return Err(BenchError::Config(format!("unknown matvec mode `{v}` (factored, dense)"))),
                }
            }
            "precond" => {
                self.precond = match v {
                    "banded" => PrecondStorage::BandedLu,
                    "dense-inverse" => PrecondStorage::DenseInverse,
                    _ => {
                        return Err(BenchError::Config(format!(
                            "unknown preconditioner storage `{v}` (banded, dense-inverse)"
                        )))
                    }
                }
            }
            "quadrature" => {
                self.quadrature = if v == "mid-edge" {
                    CoefficientQuadrature::MidEdge
                } else if let Some(n) = v.strip_prefix("gauss:") {
                    CoefficientQuadrature::CollapsedGauss(num(key, n)?)
                } else {
                    return Err(BenchError::Config(format!("unknown quadrature `{v}` (mid-edge, gauss:<n>)")));
                }
            }
            "output" => self.output = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            _ => return Err(BenchError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies every `key=value` line of a config file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), BenchError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("line {}: expected key=value", lineno + 1)))?;
            self.set(k.trim(), v)
                .map_err(|e| BenchError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Applies whitespace-separated `key=value` tokens (one sweep line).
    pub fn apply_tokens(&mut self, line: &str) -> Result<(), BenchError> {
        for tok in line.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("expected key=value, got `{tok}`")))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Config(m.to_string()));
        if self.n == 0 {
            return bad("N must be at least 1");
        }
        if self.np < 3 {
            return bad("Np must be at least 3");
        }
        if !(self.c >= 0.0) || !self.c.is_finite() {
            return bad("c must be a finite non-negative number");
        }
        if !(self.l > 0.0) {
            return bad("l must be positive");
        }
        if !(self.sigma >= 0.0) {
            return bad("sigma must be non-negative");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if !(self.eps_rel >= 0.0) {
            return bad("eps_rel must be non-negative");
        }
        if self.max_it == 0 {
            return bad("max_it must be at least 1");
        }
        Ok(())
    }

    pub fn spec(&self) -> ProblemSpec<f64> {
        let mut s = ProblemSpec::new(self.n, self.q, self.np, self.c);
        s.mean = self.alpha_bar;
        s.std_dev = self.sigma;
        s.corr_len = self.l;
        s.source = self.f;
        s.boundary_value = self.g;
        s.dirichlet = self.dirichlet_edges.clone();
        s.quadrature = self.quadrature;
        s.matvec = self.matvec;
        s
    }

    pub fn solver_config(&self) -> sghelm::krylov::SolverConfig {
        sghelm::krylov::SolverConfig {
            tol: self.tol,
            eps_rel: self.eps_rel,
            max_it: self.max_it,
            record_timings: true,
        }
    }
}

/// Parses a sweep file: each non-comment line lists `key=value` overrides
/// applied on top of `base`.
pub fn parse_sweep(text: &str, base: &ProblemConfig) -> Result<Vec<ProblemConfig>, BenchError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cfg = base.clone();
        cfg.apply_tokens(line)
            .map_err(|e| BenchError::Config(format!("sweep line {}: {e}", lineno + 1)))?;
        cfg.validate()
            .map_err(|e| BenchError::Config(format!("sweep line {}: {e}", lineno + 1)))?;
        out.push(cfg);
    }
    Ok(out)
}
