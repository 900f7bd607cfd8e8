//! Matrix completion: solver, penalty bounds and dual certificates.

mod bounds;
mod certificate;
mod solver;

pub use bounds::{mc_tau_bound_data, mc_tau_bound_oracle, mc_tau_bound_oracle_with, McOracleBound};
pub use certificate::{
    build_mc_certificate, build_mc_certificate_with, check_mc_certificate, check_mc_certificate_with_tol,
    check_sampling_operator, lemma1_lambda, CertificateReport, McCertificate, SamplingOperatorReport, CERTIFICATE_TOL,
};
pub(crate) use solver::validate_tau;
pub use solver::{
    mc_inclusion_residuals, mc_step_size, relative_error, solve_mc, InclusionResiduals, McSolution, McSolveOptions,
    SolveReport,
};
