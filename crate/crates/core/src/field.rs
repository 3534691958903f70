//! Truncated Karhunen–Loève expansion of the random coefficient on the unit
//! square, using the separable exponential eigenfamily
//! `v_{i,j} = ¼·exp(-π(i²+j²)l²)`, `φ_{i,j} = 2cos(iπx)cos(jπy)`.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlMode<R: Real> {
    pub i: u32,
    pub j: u32,
    pub sqrt_lambda: R,
}

impl<R: Real> KlMode<R> {
    pub fn eigenvalue(&self) -> R {
        self.sqrt_lambda * self.sqrt_lambda
    }

    /// `φ(x, y) = 2cos(iπx)cos(jπy)`.
    pub fn eval(&self, p: [R; 2]) -> R {
        let pi = R::pi();
        R::lit(2.0)
            * (R::from_count(self.i as usize) * pi * p[0]).cos()
            * (R::from_count(self.j as usize) * pi * p[1]).cos()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlExpansion<R: Real> {
    pub mean: R,
    pub std_dev: R,
    pub corr_len: R,
    pub modes: Vec<KlMode<R>>,
}

impl<R: Real> KlExpansion<R> {
    /// Retains the `n` largest eigenpairs. Equal eigenvalues are ordered
    /// lexicographically in `(i, j)`.
    pub fn new(n: usize, corr_len: R, std_dev: R, mean: R) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("KLE length must be at least 1".into()));
        }
        if !(corr_len > R::zero()) {
            return Err(Error::InvalidParameter("correlation length must be positive".into()));
        }
        if std_dev < R::zero() {
            return Err(Error::InvalidParameter("standard deviation must be non-negative".into()));
        }
        // The n smallest i²+j² all have i, j <= n.
        let mut pairs: Vec<(u64, u32, u32)> = Vec::with_capacity(n * n);
        for i in 1..=n as u32 {
            for j in 1..=n as u32 {
                pairs.push(((i * i + j * j) as u64, i, j));
            }
        }
        pairs.sort_unstable();
        let l2 = corr_len * corr_len;
        let modes = pairs
            .into_iter()
            .take(n)
            .map(|(s, i, j)| {
                let v = R::lit(0.25) * (-R::pi() * R::from_count(s as usize) * l2).exp();
                KlMode {
                    i,
                    j,
                    sqrt_lambda: v.sqrt(),
                }
            })
            .collect();
        Ok(Self {
            mean,
            std_dev,
            corr_len,
            modes,
        })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Spatial weight `σ_α·√λ_m·φ_m(x)` of mode `m` (1-based); mode 0 is the mean.
    pub fn mode_weight(&self, m: usize, p: [R; 2]) -> R {
        if m == 0 {
            self.mean
        } else {
            let mode = &self.modes[m - 1];
            self.std_dev * mode.sqrt_lambda * mode.eval(p)
        }
    }

    /// `α_N(x, ξ) = ᾱ + σ_α Σ_m √λ_m φ_m(x) ξ_m`.
    pub fn eval(&self, p: [R; 2], xi: &[R]) -> R {
        assert_eq!(xi.len(), self.modes.len(), "sample dimension differs from KLE length");
        self.modes.iter().zip(xi).fold(self.mean, |acc, (m, &x)| {
            acc + self.std_dev * m.sqrt_lambda * m.eval(p) * x
        })
    }

    /// Worst-case lower bound of `α_N` over `ξ ∈ [-√3, √3]^N` at `p`.
    pub fn lower_bound_at(&self, p: [R; 2]) -> R {
        let s3 = R::lit(3.0).sqrt();
        let spread = self
            .modes
            .iter()
            .fold(R::zero(), |acc, m| acc + m.sqrt_lambda * m.eval(p).abs());
        self.mean - self.std_dev * s3 * spread
    }

    /// Minimises [`Self::lower_bound_at`] over a `grid_n × grid_n` grid of
    /// the unit square. The field is uniformly positive iff the minimum is
    /// positive.
    pub fn positivity_check(&self, grid_n: usize) -> Result<PositivityReport<R>> {
        if grid_n < 2 {
            return Err(Error::InvalidParameter("positivity grid needs at least 2 points".into()));
        }
        let step = R::one() / R::from_count(grid_n - 1);
        let mut beta1 = R::max_value().expect("bounded real");
        for a in 0..grid_n {
            for b in 0..grid_n {
                let p = [R::from_count(a) * step, R::from_count(b) * step];
                let lb = self.lower_bound_at(p);
                if lb < beta1 {
                    beta1 = lb;
                }
            }
        }
        Ok(PositivityReport {
            beta1_estimate: beta1,
            positive: beta1 > R::zero(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityReport<R> {
    pub beta1_estimate: R,
    pub positive: bool,
}
