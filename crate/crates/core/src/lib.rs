//! Stochastic Galerkin finite elements for the Helmholtz equation with a
//! random coefficient, solved by a preconditioned low-rank BiCG method.
//!
//! The numerical core is generic over the real component type through
//! [`scalar::Real`]; the aliases below fix it to `f64` or `f32`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod banded;
pub mod chaos;
pub mod error;
pub mod existence;
pub mod fem;
pub mod field;
pub mod krylov;
pub mod lowrank;
pub mod operator;
pub mod problem;
pub mod quadrature;
pub mod scalar;
pub mod sparse;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

pub type Complex64 = Cx<f64>;
pub type Complex32 = Cx<f32>;

pub type LowRank = lowrank::LowRankFactor<f64>;
pub type LowRank32 = lowrank::LowRankFactor<f32>;
pub type KronOp = operator::KronOperator<f64>;
pub type KronOp32 = operator::KronOperator<f32>;
pub type Preconditioner = operator::MeanPreconditioner<f64>;
pub type Preconditioner32 = operator::MeanPreconditioner<f32>;
pub type Kle = field::KlExpansion<f64>;
pub type Mesh = fem::TriMesh<f64>;
pub type Problem = problem::Problem<f64>;
pub type Problem32 = problem::Problem<f32>;
pub type ProblemSpec = problem::ProblemSpec<f64>;
pub type SparseC64 = sparse::CsrMatrix<Complex64>;
