use std::time::Instant;

use log::warn;

use crate::error::{Error, PartialSolution, Result};
use crate::linalg::{soft_threshold, spectral_norm, sv_shrink_factors, DenseMatrix, DEFAULT_RANK_CUTOFF};
use crate::mc::{validate_tau, SolveReport};

/// `1/√max(n1, n2)`.
pub fn default_lambda(n1: usize, n2: usize) -> f64 {
    1.0 / (n1.max(n2).max(1) as f64).sqrt()
}

pub(crate) fn validate_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::param("lambda", format!("must lie in (0, 1), got {lambda}")))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RpcaSolveOptions {
    /// Dual step `δ`. `None` uses `0.9/τ`.
    pub step_size: Option<f64>,
    pub max_iters: usize,
    /// Stop when `‖D − L − S‖_F / ‖D‖_F ≤ feas_tol`.
    pub feas_tol: f64,
    pub rank_cutoff: f64,
    pub record_trace: bool,
}

impl Default for RpcaSolveOptions {
    fn default() -> Self {
        Self {
            step_size: None,
            max_iters: 5000,
            feas_tol: 1e-7,
            rank_cutoff: DEFAULT_RANK_CUTOFF,
            record_trace: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RpcaSolution {
    pub l: DenseMatrix,
    pub s: DenseMatrix,
    pub dual: DenseMatrix,
    pub report: SolveReport,
}

/// Resolves the dual step for robust PCA; the constraint map `[I I]` has squared norm 2.
pub fn rpca_step_size(requested: Option<f64>, tau: f64) -> f64 {
    let safe = 0.9 / tau;
    match requested {
        None => safe,
        Some(step) if step > 0.0 && step < 1.0 / tau => step,
        Some(step) => {
            warn!("step size {step:e} is outside (0, 1/tau); clamping to 0.9/tau = {safe:e}");
            safe
        }
    }
}

/// Iterative thresholding for
/// `min ‖L‖_* + λ‖S‖₁ + (‖L‖_F² + ‖S‖_F²)/(2τ)` s.t. `L + S = D`:
///
/// ```text
/// L_k = shrink(τ Y_{k−1}, τ)
/// S_k = soft(τ Y_{k−1}, λτ)
/// Y_k = Y_{k−1} + δ (D − L_k − S_k)
/// ```
///
/// starting from `Y₀ = D/‖D‖`.
pub fn solve_rpca(d: &DenseMatrix, lambda: f64, tau: f64, opts: &RpcaSolveOptions) -> Result<RpcaSolution> {
    validate_lambda(lambda)?;
    validate_tau(tau)?;
    let start = Instant::now();
    let step = rpca_step_size(opts.step_size, tau);
    let (n1, n2) = d.shape();
    let mut report = SolveReport {
        step_size: step,
        ..SolveReport::default()
    };

    let d_norm = d.frobenius_norm();
    if d_norm == 0.0 {
        report.converged = true;
        report.wall_time = start.elapsed();
        return Ok(RpcaSolution {
            l: DenseMatrix::zeros(n1, n2),
            s: DenseMatrix::zeros(n1, n2),
            dual: DenseMatrix::zeros(n1, n2),
            report,
        });
    }

    let mut y = d.scale(1.0 / spectral_norm(d)?);
    let mut l = DenseMatrix::zeros(n1, n2);
    let mut s = DenseMatrix::zeros(n1, n2);
    for it in 1..=opts.max_iters {
        let z = y.scale(tau);
        let factors = sv_shrink_factors(&z, tau)?;
        l = factors.reconstruct();
        s = soft_threshold(&z, lambda * tau);
        let mut residual = d - &l;
        residual.axpy(-1.0, &s);
        let feas = residual.frobenius_norm() / d_norm;

        report.iterations = it;
        report.feas_residual = feas;
        report.final_rank = factors.rank();
        if opts.record_trace {
            let nuclear: f64 = factors.sigma.iter().sum();
            let fro_sq: f64 = factors.sigma.iter().map(|v| v * v).sum::<f64>() + s.dot(&s);
            report.feas_trace.push(feas);
            report
                .dual_objective_trace
                .push(nuclear + lambda * s.l1_norm() + fro_sq / (2.0 * tau) + y.dot(&residual));
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
            solver: "robust PCA",
            iterations: report.iterations,
            residual: report.feas_residual,
            tol: opts.feas_tol,
            partial: Box::new(PartialSolution {
                primary: l,
                secondary: Some(s),
                dual: y,
                report,
            }),
        });
    }
    Ok(RpcaSolution { l, s, dual: y, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lambda_examples() {
        assert!((default_lambda(400, 400) - 0.05).abs() < 1e-15);
        assert!((default_lambda(100, 25) - 0.1).abs() < 1e-15);
        assert_eq!(default_lambda(1, 1), 1.0);
    }

    #[test]
    fn zero_data() {
        let sol = solve_rpca(&DenseMatrix::zeros(5, 4), 0.3, 2.0, &RpcaSolveOptions::default()).unwrap();
        assert!(sol.l.is_zero() && sol.s.is_zero());
        assert_eq!(sol.report.iterations, 0);
    }

    #[test]
    fn rejects_lambda_one() {
        let d = DenseMatrix::identity(3);
        assert!(solve_rpca(&d, 1.0, 2.0, &RpcaSolveOptions::default()).is_err());
        assert!(solve_rpca(&d, 0.0, 2.0, &RpcaSolveOptions::default()).is_err());
        assert!(solve_rpca(&d, 0.5, -2.0, &RpcaSolveOptions::default()).is_err());
    }

    #[test]
    fn step_clamp() {
        assert!((rpca_step_size(None, 10.0) - 0.09).abs() < 1e-15);
        assert!((rpca_step_size(Some(0.2), 10.0) - 0.09).abs() < 1e-15);
        assert_eq!(rpca_step_size(Some(0.05), 10.0), 0.05);
    }

    #[test]
    fn tiny_sparse_data_is_all_sparse() {
        // With M = 0 and λ near 1, (0, D) is optimal when the dual λ sgn(D) + D/τ has
        // spectral norm at most 1.
        let n = 12;
        // At most one entry per row and column keeps ‖λ sgn(D)‖ = λ.
        let d = DenseMatrix::from_fn(n, n, |i, j| match (i % 2, j == (5 * i + 1) % n) {
            (0, true) => 1e-3,
            (1, true) if i % 3 == 0 => -1e-3,
            _ => 0.0,
        });
        let lambda = 0.9;
        let tau = 1.0;
        let mut cand = d.signum().scale(lambda);
        cand.axpy(1.0 / tau, &d);
        assert!(spectral_norm(&cand).unwrap() <= 1.0);
        let sol = solve_rpca(&d, lambda, tau, &RpcaSolveOptions::default()).unwrap();
        assert!(sol.l.frobenius_norm() <= 1e-6 * d.frobenius_norm());
        assert!((&sol.s - &d).frobenius_norm() <= 1e-6 * d.frobenius_norm());
    }
}
