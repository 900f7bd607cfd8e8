//! Dense matrices, norms, factorizations, projections and shrinkage operators.

pub mod iterative;
pub mod matrix;
pub mod norms;
pub mod operator;
pub mod project;
pub mod prox;
pub mod support;
pub mod svd;

pub use iterative::{cg_solve, cg_solve_projected, power_op_norm, CgOptions, CgSolution, PowerEstimate};
pub use matrix::DenseMatrix;
pub use norms::{matrix_norm, nuclear_norm, spectral_norm, NormKind};
pub use operator::{
    adjoint_gap, FnMap, LinearMap, OmegaProjector, SampledTangentMap, ScaledIdentity, TangentProjector,
};
pub use project::{project_omega, project_omega_perp, project_tangent, Side, TangentBasis};
pub use prox::{soft_threshold, sv_shrink, sv_shrink_factors};
pub use support::SupportSet;
pub use svd::{singular_values, svd, svd_strict_rank, SvdFactors, DEFAULT_RANK_CUTOFF};
