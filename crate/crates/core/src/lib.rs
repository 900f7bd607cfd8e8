//! Exact low-rank matrix recovery through strongly convex programs.
//!
//! The crate solves
//!
//! * matrix completion: `min ‖X‖_* + ‖X‖_F²/(2τ)` subject to `P_Ω X = P_Ω M`, by Uzawa
//!   dual ascent (singular value thresholding), and
//! * robust PCA: `min ‖L‖_* + ‖L‖_F²/(2τ) + λ‖S‖₁ + ‖S‖_F²/(2τ)` subject to `L + S = D`, by
//!   iterative thresholding on the dual,
//!
//! together with the explicit lower bounds on `τ` above which the strongly convex
//! solution coincides with the ground truth, and the dual certificates that prove it.
//!
//! Module map:
//!
//! * [`linalg`]: dense matrices, norms, SVD, projections, shrinkage, power iteration, CG.
//! * [`problem`]: seeded instance generators and incoherence estimators.
//! * [`mc`]: matrix completion solver, τ bounds and certificate.
//! * [`rpca`]: robust PCA solver, τ bounds, ε choice and certificate conditions.
//! * [`experiments`]: file formats, sweeps and the commands behind the `lowrank` binary.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod linalg;
pub mod mc;
pub mod problem;
pub mod rpca;

pub use error::{Error, PartialSolution, Result};
pub use linalg::{DenseMatrix, NormKind, SupportSet, SvdFactors, TangentBasis};
