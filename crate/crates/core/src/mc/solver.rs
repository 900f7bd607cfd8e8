use std::time::{Duration, Instant};

use log::warn;
use serde::Serialize;

use crate::error::{Error, PartialSolution, Result};
use crate::linalg::project::project_omega_unchecked;
use crate::linalg::{
    spectral_norm, sv_shrink_factors, DenseMatrix, Side, SupportSet, TangentBasis, DEFAULT_RANK_CUTOFF,
};

#[derive(Clone, Copy, Debug)]
pub struct McSolveOptions {
    /// Dual ascent step `δ`. `None` uses `1.2/(ρ̂ τ)` clamped to `1.9/τ`.
    pub step_size: Option<f64>,
    pub max_iters: usize,
    /// Stop when `‖P_Ω(X − M)‖_F / ‖P_Ω M‖_F ≤ feas_tol`.
    pub feas_tol: f64,
    pub rank_cutoff: f64,
    /// Keep per-iteration feasibility and dual objective traces.
    pub record_trace: bool,
}

impl Default for McSolveOptions {
    fn default() -> Self {
        Self {
            step_size: None,
            max_iters: 5000,
            feas_tol: 1e-6,
            rank_cutoff: DEFAULT_RANK_CUTOFF,
            record_trace: false,
        }
    }
}

/// Convergence diagnostics shared by both solvers.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Final relative feasibility residual.
    pub feas_residual: f64,
    pub feas_trace: Vec<f64>,
    pub dual_objective_trace: Vec<f64>,
    /// Relative error against ground truth, filled in by callers that have it.
    pub rel_error: Option<f64>,
    pub step_size: f64,
    /// Rank of the final low-rank iterate.
    pub final_rank: usize,
    #[serde(serialize_with = "serialize_ms")]
    pub wall_time: Duration,
}

fn serialize_ms<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Clone, Debug)]
pub struct McSolution {
    pub x: DenseMatrix,
    /// The multiplier `Y` (supported on `Ω`) whose shrinkage produced `x`.
    pub dual: DenseMatrix,
    pub report: SolveReport,
}

pub(crate) fn validate_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::param("tau", format!("must be positive and finite, got {tau}")))
    }
}

/// Resolves the dual step for matrix completion.
pub fn mc_step_size(requested: Option<f64>, tau: f64, sampling_ratio: f64) -> f64 {
    let safe = 1.9 / tau;
    match requested {
        None => {
            let heuristic = if sampling_ratio > 0.0 {
                1.2 / (sampling_ratio * tau)
            } else {
                safe
            };
            heuristic.min(safe)
        }
        Some(step) if step > 0.0 && step < 2.0 / tau => step,
        Some(step) => {
            warn!("step size {step:e} is outside (0, 2/tau); clamping to 1.9/tau = {safe:e}");
            safe
        }
    }
}

/// Uzawa's method for `min ‖X‖_* + ‖X‖_F²/(2τ)` s.t. `P_Ω X = P_Ω M`:
///
/// ```text
/// X_k = shrink(τ Y_{k−1}, τ)
/// Y_k = Y_{k−1} + δ P_Ω(M − X_k)
/// ```
///
/// starting from `Y₀ = 0`. On success the returned dual is `Y_{k−1}`, so `x` is the exact
/// Lagrangian minimizer for it.
pub fn solve_mc(observed: &DenseMatrix, omega: &SupportSet, tau: f64, opts: &McSolveOptions) -> Result<McSolution> {
    validate_tau(tau)?;
    omega.ensure_matches(observed)?;
    let mask = omega.mask();
    if let Some(k) = observed
        .as_slice()
        .iter()
        .zip(&mask)
        .position(|(&v, &inside)| !inside && v != 0.0)
    {
        return Err(Error::param(
            "observed",
            format!(
                "entry ({}, {}) is nonzero outside omega",
                k / observed.cols(),
                k % observed.cols()
            ),
        ));
    }

    let start = Instant::now();
    let step = mc_step_size(opts.step_size, tau, omega.density());
    let data_norm = observed.frobenius_norm();
    let scale = if data_norm > 0.0 { data_norm } else { 1.0 };

    let mut y = DenseMatrix::zeros(observed.rows(), observed.cols());
    let mut report = SolveReport {
        step_size: step,
        ..SolveReport::default()
    };
    let mut x = DenseMatrix::zeros(observed.rows(), observed.cols());

    for it in 1..=opts.max_iters {
        let factors = sv_shrink_factors(&y.scale(tau), tau)?;
        x = factors.reconstruct();
        let residual = &project_omega_unchecked(observed, omega) - &project_omega_unchecked(&x, omega);
        let feas = residual.frobenius_norm() / scale;

        report.iterations = it;
        report.feas_residual = feas;
        report.final_rank = factors.rank();
        if opts.record_trace {
            // Dual function value g(Y_{k−1}) = L(X_k, Y_{k−1}).
            let nuclear: f64 = factors.sigma.iter().sum();
            let fro_sq: f64 = factors.sigma.iter().map(|s| s * s).sum();
            report.feas_trace.push(feas);
            report
                .dual_objective_trace
                .push(nuclear + fro_sq / (2.0 * tau) + y.dot(&residual));
        }
        if feas <= opts.feas_tol {
            report.converged = true;
            break;
        }
        y.axpy(step, &residual);
    }
    report.wall_time = start.elapsed();

    if !report.converged {
        return Err(Error::NotConverged {
            solver: "matrix completion",
            iterations: report.iterations,
            residual: report.feas_residual,
            tol: opts.feas_tol,
            partial: Box::new(PartialSolution {
                primary: x,
                secondary: None,
                dual: y,
                report,
            }),
        });
    }
    Ok(McSolution { x, dual: y, report })
}

/// Residuals of the optimality inclusion `0 ∈ ∂‖X‖_* + X/τ − P_Ω Y`, written as
/// `W := Y − X/τ − U Vᵀ` with `P_T W = 0` and `‖W‖ ≤ 1`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct InclusionResiduals {
    /// `‖P_T W‖_F`
    pub tangent_residual: f64,
    /// `‖W‖`
    pub w_norm: f64,
}

pub fn mc_inclusion_residuals(
    x: &DenseMatrix,
    dual: &DenseMatrix,
    tau: f64,
    rank_cutoff: f64,
) -> Result<InclusionResiduals> {
    validate_tau(tau)?;
    dual.ensure_shape(x.shape())?;
    let t = TangentBasis::from_factors(&crate::linalg::svd(x, rank_cutoff)?);
    let mut w = dual - &x.scale(1.0 / tau);
    w.axpy(-1.0, &t.uv_t());
    Ok(InclusionResiduals {
        tangent_residual: t.project(&w, Side::T)?.frobenius_norm(),
        w_norm: spectral_norm(&w)?,
    })
}

/// `‖X − M‖_F / ‖M‖_F`, or `‖X‖_F` when `M = 0`.
pub fn relative_error(x: &DenseMatrix, truth: &DenseMatrix) -> f64 {
    let diff = (x - truth).frobenius_norm();
    let norm = truth.frobenius_norm();
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}
