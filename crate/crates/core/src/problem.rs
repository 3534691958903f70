//! End-to-end assembly of a discrete problem `P(N, Q, Np, c)`.

use std::collections::BTreeSet;

use crate::chaos::{MultiIndexSet, StochasticMatrices};
use crate::error::Result;
use crate::fem::{assemble_rhs, AssemblyOptions, CoefficientQuadrature, HelmholtzMatrices, LoadVectors, Side, TriMesh};
use crate::field::KlExpansion;
use crate::lowrank::LowRankFactor;
use crate::operator::{rhs_lowrank, KronOperator, MatvecMode, MeanPreconditioner, PrecondStorage};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec<R: Real> {
    /// KLE length `N`.
    pub n_kle: usize,
    /// Total chaos degree `Q`.
    pub degree: usize,
    /// Grid points per direction `Np`.
    pub np: usize,
    /// Wave number `c`.
    pub wave_number: R,
    /// `ᾱ`
    pub mean: R,
    /// `σ_α`
    pub std_dev: R,
    /// Correlation length `l`.
    pub corr_len: R,
    /// Constant source `f`.
    pub source: R,
    /// Constant Dirichlet value `g`.
    pub boundary_value: R,
    pub dirichlet: BTreeSet<Side>,
    pub quadrature: CoefficientQuadrature,
    pub matvec: MatvecMode,
}

impl<R: Real> ProblemSpec<R> {
    /// `P(N, Q, Np, c)` with `ᾱ = 5`, `σ_α = 1`, `l = 1`, `f = 0`, `g = 0.1`.
    pub fn new(n_kle: usize, degree: usize, np: usize, wave_number: R) -> Self {
        Self {
            n_kle,
            degree,
            np,
            wave_number,
            mean: R::lit(5.0),
            std_dev: R::one(),
            corr_len: R::one(),
            source: R::zero(),
            boundary_value: R::lit(0.1),
            dirichlet: BTreeSet::from([Side::Left]),
            quadrature: CoefficientQuadrature::MidEdge,
            matvec: MatvecMode::Factored,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Problem<R: Real> {
    pub mesh: TriMesh<R>,
    pub kle: KlExpansion<R>,
    pub basis: MultiIndexSet,
    pub stochastic: StochasticMatrices<R>,
    pub matrices: HelmholtzMatrices<R>,
    pub loads: LoadVectors<R>,
    pub operator: KronOperator<R>,
    pub rhs: LowRankFactor<R>,
}

impl<R: Real> Problem<R> {
    pub fn assemble(spec: &ProblemSpec<R>) -> Result<Self> {
        let (f, g) = (spec.source, spec.boundary_value);
        Self::assemble_with(spec, &AssemblyOptions {
            quadrature: spec.quadrature,
            element_modifier: None,
        }, &move |_| f, &move |_| g)
    }

    pub fn assemble_with(
        spec: &ProblemSpec<R>,
        opts: &AssemblyOptions<'_, R>,
        f: &dyn Fn([R; 2]) -> R,
        g: &dyn Fn([R; 2]) -> R,
    ) -> Result<Self> {
        let kle = KlExpansion::new(spec.n_kle, spec.corr_len, spec.std_dev, spec.mean)?;
        let basis = MultiIndexSet::new(spec.n_kle, spec.degree)?;
        let stochastic = StochasticMatrices::assemble(&basis);
        let mesh = TriMesh::new(spec.np, &spec.dirichlet)?;
        let matrices = HelmholtzMatrices::assemble(&mesh, &kle, spec.wave_number, opts)?;
        let loads = assemble_rhs(&mesh, &matrices, f, g, opts.quadrature);
        let operator = KronOperator::new(stochastic.g.clone(), matrices.k.clone())?.with_matvec_mode(spec.matvec);
        let rhs = rhs_lowrank(&loads.spatial_rhs(), basis.len());
        Ok(Self {
            mesh,
            kle,
            basis,
            stochastic,
            matrices,
            loads,
            operator,
            rhs,
        })
    }

    pub fn preconditioner(&self, storage: PrecondStorage) -> Result<MeanPreconditioner<R>> {
        MeanPreconditioner::prepare(self.matrices.k0(), &self.stochastic.g[0], storage)
    }
}
