//! Robust PCA: solver, penalty bounds, and dual certificate checks.

mod bounds;
mod optimality;
mod solver;
mod theorem5;
mod witness;

pub use bounds::{optimal_epsilon, rpca_tau_bound_data, rpca_tau_bound_oracle, EpsilonChoice, RpcaOracleBound};
pub use optimality::{check_rpca_optimality, RpcaOptimalityReport};
pub use solver::{default_lambda, rpca_step_size, solve_rpca, RpcaSolution, RpcaSolveOptions};
pub use theorem5::{
    check_theorem5, constraint27, pomega_pt_norm, theorem5_candidate, Theorem5Candidate, Theorem5Report,
};
pub use witness::{
    build_lemma_witnesses, build_lemma_witnesses_with, check_lemma_witnesses, min_norm_tperp, LemmaWitnessReport,
    LemmaWitnesses,
};
